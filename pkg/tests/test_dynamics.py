"""Unit tests for the reduced flow, the E = 0 wavefunction, KdV and closed forms."""

import numpy as np
import pandas as pd
import pytest

from coadj_utils.circlefield import CircleField
from coadj_utils.errors import ConfigurationError, DomainError
from coadj_utils.dynamics import (
    CLOSED_FORM_CASES,
    PhasePoint,
    ReducedSystem,
    e0_divergence_rate,
    e0_integrand,
    e0_wavefunction,
    ep_to_kdv_check,
    hamiltonian_drift,
    integrate_reduced,
    kdv_evolve,
    omega_limit_zero,
    omega_near_one,
    printed_rhs_deviation,
    reduced_rhs,
    soliton_error,
    verify_closed_form,
    z_derivatives_at_one,
    z_function,
)


class TestReducedSystem:
    """Tests for the finite reduction in (Q, P)."""

    def test_triple_zero_at_one(self):
        """Test Z(1) = Z′(1) = Z″(1) = 0 and Z‴(1) = 4."""
        z, first, second, third = z_derivatives_at_one()
        assert z == 0.0
        assert first == 0.0
        assert abs(second) < 1e-3
        assert third == pytest.approx(4.0, abs=1e-3)

    def test_z_is_stable_near_one(self):
        """Test Z ≈ (2/3)(Q − 1)³ without cancellation."""
        offset = 1e-4
        assert z_function(1.0 + offset) == pytest.approx(2.0 / 3.0 * offset**3, rel=1e-3)

    def test_rejects_zero_charge(self):
        """Test that c = 0 raises ConfigurationError."""
        with pytest.raises(ConfigurationError):
            ReducedSystem(c=0.0)

    @pytest.mark.parametrize("q", [-1.0, 0.0, 1.0005])
    def test_domain(self, q):
        """Test that Q ≤ 0 and Q near 1 are rejected."""
        with pytest.raises(DomainError):
            reduced_rhs(PhasePoint(q, 0.1), ReducedSystem())

    def test_printed_rhs(self):
        """Test which printed right-hand sides agree with the (H, ω) flow."""
        deviation = printed_rhs_deviation(PhasePoint(2.0, 0.5), ReducedSystem())
        assert deviation["Qdot"] < 1e-9
        assert deviation["Pdot_4pi3"] < 1e-9
        assert deviation["Pdot_(4pi)3"] > 1.0
        assert deviation["Pdot_ln4"] > 1.0

    def test_integration_conserves_energy(self):
        """Test the sampled trajectory and its energy drift."""
        frame = integrate_reduced(PhasePoint(2.0, 0.01), ReducedSystem(), t_end=0.5, dt=0.1)
        assert list(frame.columns) == ["t", "Q", "P", "H"]
        assert frame["t"].iloc[0] == 0.0
        assert len(frame) >= 5
        assert frame["Q"].is_monotonic_increasing
        assert hamiltonian_drift(frame) < 1e-7

    def test_integration_arguments(self):
        """Test that non-positive durations raise."""
        with pytest.raises(ConfigurationError):
            integrate_reduced(PhasePoint(2.0, 0.01), ReducedSystem(), t_end=0.0, dt=0.1)

    def test_hamiltonian_drift(self):
        """Test the relative drift of a sampled H column."""
        frame = pd.DataFrame({"H": [2.0, 2.0, 2.2]})
        assert hamiltonian_drift(frame) == pytest.approx(0.1)

    def test_omega_near_zero(self):
        """Test that ω → 1/8 only after extrapolation."""
        result = omega_limit_zero()
        assert result["extrapolated"] == pytest.approx(0.125, abs=1e-4)
        assert abs(result["direct"] - 0.125) > 0.01

    def test_omega_near_one(self):
        """Test the |Q − 1|⁻⁶ divergence of ω."""
        result = omega_near_one()
        assert result["exponent_above"] == pytest.approx(-6.0, abs=0.1)
        assert result["exponent_below"] == pytest.approx(-6.0, abs=0.1)
        assert result["prefactor_above"] == pytest.approx(27.0 / 8.0, rel=0.2)
        assert not result["claim_holds"]


class TestE0Wavefunction:
    """Tests for the zero-energy wavefunction."""

    def test_integrand_power(self):
        """Test that only powers 1 and 3 are accepted."""
        with pytest.raises(ConfigurationError):
            e0_integrand(2.0, power=2)

    @pytest.mark.parametrize("power,limit", [(1, 1.5), (3, 27.0 / 8.0)])
    def test_divergence_rate(self, power, limit):
        """Test the rate at which the integrand blows up at Q = 1."""
        rates = e0_divergence_rate(power=power)
        assert rates[-1] == pytest.approx(limit, rel=1e-3)

    def test_wavefunction(self):
        """Test ψ at the base point and the ODE residual."""
        result = e0_wavefunction([1.5, 2.0, 3.0], c1=0.25)
        assert result.base_point == 1.5
        assert result.psi[0] == pytest.approx(0.25)
        assert result.psi[2] > result.psi[1] > result.psi[0]
        assert result.residual < 1e-5
        assert list(result.to_frame().columns) == ["Q", "psi"]

    def test_below_one(self):
        """Test that a range below 1 uses a base point below 1."""
        result = e0_wavefunction([0.3, 0.5], power=3)
        assert result.base_point < 1.0
        assert result.residual < 1e-5

    @pytest.mark.parametrize("q_values", [[0.5, 2.0], [1.0, 2.0], [-0.5, 0.5]])
    def test_domain(self, q_values):
        """Test ranges that straddle or touch the singular points."""
        with pytest.raises(DomainError):
            e0_wavefunction(q_values)


class TestKdv:
    """Tests for the pseudo-spectral KdV solver."""

    def test_linear_dispersion(self):
        """Test that cos θ travels with phase speed a − q."""
        a, q, t_end = 1.0, 0.3, 0.5
        trajectory = kdv_evolve(CircleField.cos(1), a, 0.0, q, t_end)
        expected = np.cos(trajectory.theta + (a - q) * t_end)
        np.testing.assert_allclose(trajectory.samples[-1], expected, atol=1e-10)
        assert trajectory.times[-1] == pytest.approx(t_end)

    def test_mean_is_conserved(self):
        """Test that the k = 0 mode never changes."""
        d0 = CircleField.constant(0.3) + CircleField.cos(1, 0.2)
        trajectory = kdv_evolve(d0, 0.0, 1.0, 0.1, 0.2, bandlimit=16)
        np.testing.assert_allclose(trajectory.means(), 0.3, atol=1e-12)

    def test_frame(self):
        """Test the long table of snapshots."""
        trajectory = kdv_evolve(CircleField.cos(1), 0.0, 0.0, 0.1, 0.1, bandlimit=8)
        frame = trajectory.to_frame()
        assert list(frame.columns) == ["t", "theta", "D"]
        assert len(frame) == trajectory.samples.size
        assert trajectory.snapshot(0).distance(CircleField.cos(1)) < 1e-12

    @pytest.mark.slow
    def test_soliton(self):
        """Test that a single soliton returns to its translated profile."""
        assert soliton_error() < 1e-3

    def test_euler_poincare_to_kdv(self):
        """Test the rescaling of the X = D flow into KdV."""
        result = ep_to_kdv_check()
        assert result["ep_matches"]
        assert result["holds"]


class TestClosedForms:
    """Tests for closed-form solutions of the field equations."""

    @pytest.mark.parametrize("case", CLOSED_FORM_CASES)
    def test_closed_form(self, case):
        """Test that each default closed form solves its equations."""
        report = verify_closed_form(case)
        assert report.passed, report.to_dict()

    def test_alpha0_needs_unit_beta(self):
        """Test that the α = 0 family fails away from β = 1."""
        report = verify_closed_form("chiral-alpha0", parameters={"beta": 0.5})
        assert not report.passed

    def test_cube_root_family_on_fine_grid(self):
        """Test the shifted cube-root family at q = 0 on a finer grid and another α, β."""
        report = verify_closed_form("chiral-q0", parameters={"alpha": 1.3, "beta": 0.8}, n_points=81)
        assert report.max_residual < 1e-8, report.to_dict()

    def test_alternative_q0_forces_zero(self):
        """Test that the q = 0 variant ignores a passed q."""
        report = verify_closed_form("alternative-q0", parameters={"q": 0.7})
        assert report.parameters["q"] == 0.0

    def test_unknown_case(self):
        """Test that unknown cases raise ConfigurationError."""
        with pytest.raises(ConfigurationError, match="Unknown closed-form case"):
            verify_closed_form("bogus")

    def test_to_dict(self):
        """Test the serializable report."""
        record = verify_closed_form("dxn").to_dict()
        assert record["case"] == "dxn"
        assert record["passed"] is True
        assert set(record["residuals"]) == {"Ddot", "Xdot"}
        assert record["window"] == [[0.0, 1.0], [0.0, 3.0]]
