"""Unit tests for the transverse theories built from coadjoint momenta."""

import pytest
import sympy as sp

from coadj_utils.diffpoly import PARAMETERS, DiffPoly, parse
from coadj_utils.errors import ConfigurationError
from coadj_utils.transverse import (
    FlatTensorField,
    alternative_simple_lagrangian,
    apply_gauge,
    blry_field_equations,
    build_lagrangian,
    build_momentum_flat,
    chiral_lagrangian,
    kdv_from_momentum,
    momentum_checks,
    precovariant_checks,
    precovariant_lagrangian,
    printed_field_equation_checks,
    sigma_lift,
    sigma_lift_checks,
    sigma_lift_delta,
    swap_tx,
    traveling_wave_reduction,
    ym_from_km_check,
)


def _failures(checks):
    return [check.to_dict() for check in checks if not check.holds]


class TestGaugesAndMomenta:
    """Tests for gauge slices and the covariant momentum."""

    def test_chiral_slice(self):
        """Test N = 0, Ḋ = 0 and φ′ = 0 in chiral gauge."""
        p = parse("N + Ddot + phi' + D' + phidot")
        assert apply_gauge(p, "chiral") == parse("D' + phidot")

    def test_full_temporal_slice(self):
        """Test that N and φ drop out in the full temporal gauge."""
        assert apply_gauge(parse("N*D + phi + Ddot"), "full-temporal") == parse("Ddot")

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"theory": "bogus"},
            {"gauge": "axial"},
            {"signature": "++"},
        ],
    )
    def test_unknown_choices(self, kwargs):
        """Test that unknown theories, gauges and signatures raise."""
        with pytest.raises(ConfigurationError, match="Unknown"):
            build_lagrangian(**kwargs)

    def test_signature_metric(self):
        """Test the diagonal metric for both signatures."""
        assert FlatTensorField("+-").metric == (1, -1)
        assert FlatTensorField("-+").metric == (-1, 1)

    def test_swap_tx(self):
        """Test that swapping t and x exchanges dots and primes."""
        assert swap_tx(parse("phiddot'"), {"phi": "D"}) == parse("Ddot''")
        p = parse("X*Dddot'")
        assert swap_tx(swap_tx(p)) == p

    def test_eight_components(self):
        """Test that the momentum has all eight index triples."""
        momentum = build_momentum_flat()
        assert len(momentum) == 8
        assert (1, 1, 1) in momentum and (0, 0, 0) in momentum

    def test_momentum_checks(self):
        """Test the chiral and temporal momentum components."""
        checks = momentum_checks()
        assert checks
        assert all(check.holds for check in checks), _failures(checks)

    def test_kdv_coefficients(self):
        """Test that X¹¹¹ in chiral gauge is a KdV-type operator."""
        alpha, beta, q = PARAMETERS["alpha"], PARAMETERS["beta"], PARAMETERS["q"]
        result = kdv_from_momentum()
        assert sp.simplify(result["linear"] - (-1 - 2 * beta)) == 0
        assert sp.simplify(result["nonlinear"] - 3 * alpha) == 0
        assert sp.simplify(result["dispersive"] - 6 * q) == 0

    def test_traveling_wave(self):
        """Test the reduction of a KdV-type equation to a profile ODE."""
        assert traveling_wave_reduction()["residual"] == 0


class TestFieldEquations:
    """Tests for Lagrangians and field equations of the covariant theories."""

    def test_printed_field_equations(self):
        """Test the derived BLRY equations against their closed forms."""
        checks = printed_field_equation_checks()
        assert all(check.holds for check in checks), _failures(checks)

    def test_chiral_off_diagonal_equation(self):
        """Test that the N equation is empty in chiral gauge."""
        equations = blry_field_equations("chiral")
        assert set(equations) == {"FE11", "FE12", "FE22"}
        assert equations["FE12"].is_zero

    def test_chiral_lagrangian_decouples(self):
        """Test that the chiral Lagrangian splits into D and φ parts."""
        parts = chiral_lagrangian()
        assert set(parts) == {"total", "x_part", "t_part", "mixed"}
        assert parts["mixed"].is_zero
        assert parts["x_part"] + parts["t_part"] == parts["total"]
        assert parts["x_part"].free_fields() <= {"D"}

    def test_precovariant_checks(self):
        """Test the momentum fixed point and the Gauss law."""
        checks = precovariant_checks()
        assert all(check.holds for check in checks), _failures(checks)

    def test_precovariant_unknown_theory(self):
        """Test that an unknown theory raises ConfigurationError."""
        with pytest.raises(ConfigurationError):
            precovariant_lagrangian("bogus")

    def test_alternative_kinetic_term(self):
        """Test H = DX²/2 and the closed-form solution of L = Ḋ²/(2D)."""
        result = alternative_simple_lagrangian()
        assert sp.simplify(result["hamiltonian_residual"]) == 0
        assert sp.simplify(result["closed_form_residual"]) == 0


class TestYangMills:
    """Tests for Yang-Mills from the Kac-Moody momentum."""

    @pytest.fixture(scope="class")
    def unit_report(self):
        return ym_from_km_check(1)

    def test_unit_charge_matches(self, unit_report):
        """Test π = F₀₁ and the ½F² density at c = 1."""
        assert unit_report.matches
        assert unit_report.density_matches
        assert all(check.holds for check in unit_report.gauge_variations.values())

    def test_symbolic_charge_mismatch(self):
        """Test that the mismatch is proportional to c − 1."""
        report = ym_from_km_check(PARAMETERS["c"])
        assert not report.matches
        for mismatch in report.mismatch.values():
            assert mismatch.subs_parameters({"c": 1}).is_zero

    def test_to_dict(self, unit_report):
        """Test the serializable record."""
        record = unit_report.to_dict()
        assert record["structure"] == "so3"
        assert record["c"] == "1"
        assert record["matches"] is True


class TestSigmaLift:
    """Tests for the two-dimensional lift of Σ."""

    def test_lift_checks(self):
        """Test Δ against its closed form and the reductions."""
        checks = sigma_lift_checks()
        assert all(check.holds for check in checks), _failures(checks)

    def test_lift_components(self):
        """Test that the lift has one density per index pair."""
        lifted = sigma_lift({"d": 0, "e": 0, "f": 0})
        assert set(lifted) == {(0, 0), (0, 1), (1, 0), (1, 1)}
        assert all(value.max_order("x") <= 1 for value in lifted.values())

    def test_unknown_coefficient(self):
        """Test that only a..f are accepted."""
        with pytest.raises(ConfigurationError, match="lift coefficients"):
            sigma_lift({"z": 1})

    def test_unknown_gauge(self):
        """Test that the lift gauge is validated."""
        with pytest.raises(ConfigurationError):
            sigma_lift_delta(gauge="temporal")

    def test_delta_is_polynomial(self):
        """Test that Δ components are differential polynomials in ξ and Γ."""
        delta = sigma_lift_delta(gauge="spatial")
        assert all(isinstance(value, DiffPoly) for value in delta.values())
        assert not any(value.depends_on(["xi0"]) for value in delta.values())
