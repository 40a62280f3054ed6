"""Unit tests for the Virasoro and Kac-Moody coadjoint actions."""

import numpy as np
import pytest

from coadj_utils.circlefield import CircleDiffeo, CircleField, random_diffeo, random_field
from coadj_utils.errors import ConfigurationError, DomainError
from coadj_utils.valgebra import (
    KMField,
    VirAdjoint,
    VirCoadjoint,
    beta_shift_residual,
    finite_pairing_invariance_residual,
    gauge_invariant_shift,
    jacobi_bracket_residual,
    jacobi_residual,
    kirillov_nabla3_residual,
    km_bracket,
    km_coadjoint,
    km_killing_pairing,
    mode_bracket,
    pairing,
    pairing_invariance_residual,
    random_km_field,
    representation,
    semidirect_coadjoint,
    shift_invariance_residual,
    shifted_variation,
    structure_constants,
    vir_coadjoint,
)


class TestVirasoroAlgebra:
    """Tests for brackets, pairings and the Virasoro coadjoint action."""

    @pytest.mark.parametrize(
        "m,n,c,expected",
        [
            (2, -2, 12.0, (4, 8.0)),
            (1, 1, 12.0, (0, 0.0)),
            (3, -3, 24.0, (6, 54.0)),
        ],
    )
    def test_mode_bracket(self, m, n, c, expected):
        """Test [L_m, L_n] coefficients including the central term."""
        assert mode_bracket(m, n, c) == pytest.approx(expected)

    @pytest.mark.parametrize("m", range(-4, 5))
    @pytest.mark.parametrize("n", range(-4, 5))
    def test_mode_bracket_from_realized_fields(self, m, n):
        """Test that the realized bracket gives m − n and the cocycle m n² on the diagonal only."""
        coefficient, center = mode_bracket(m, n, 12.0)
        assert coefficient == m - n
        assert center == pytest.approx(m * n * n if m + n == 0 else 0.0, abs=1e-12)

    @pytest.mark.parametrize("m,n", [(1, 2), (2, -3), (-1, 4)])
    def test_mode_bracket_jacobi(self, m, n):
        """Test the Jacobi identity of the central terms for m + n + k = 0."""
        k = -(m + n)
        cyclic = [(m, n, k), (n, k, m), (k, m, n)]
        total = 0.0
        for a, b, c in cyclic:
            coefficient, _ = mode_bracket(a, b, 12.0)
            total += coefficient * mode_bracket(a + b, c, 12.0)[1]
        assert total == pytest.approx(0.0, abs=1e-10)

    def test_pairing(self):
        """Test ⟨(u, b), (ξ, a)⟩ = b·a + ⟨uξ⟩."""
        b = VirCoadjoint(CircleField.cos(1), 2.0)
        x = VirAdjoint(CircleField.cos(1), 0.5)
        assert pairing(b, x) == pytest.approx(2.0 * 0.5 + 0.5)

    def test_infinitesimal_action_on_constant(self):
        """Test that a constant u moves by 2ξ′u + bξ‴."""
        b = VirCoadjoint(CircleField.constant(1.0), 0.0)
        moved = vir_coadjoint(b, CircleField.cos(1), "infinitesimal")
        assert moved.u.allclose(CircleField.sin(1, -2.0))
        assert moved.charge == 0.0

    def test_infinitesimal_action_needs_vector_field(self):
        """Test that a diffeo passed to the infinitesimal mode raises TypeError."""
        with pytest.raises(TypeError):
            vir_coadjoint(VirCoadjoint(CircleField.zeros()), CircleDiffeo.identity(), "infinitesimal")

    def test_unknown_mode(self):
        """Test that an unknown action mode raises ConfigurationError."""
        with pytest.raises(ConfigurationError, match="Unknown coadjoint mode"):
            vir_coadjoint(VirCoadjoint(CircleField.zeros()), CircleDiffeo.identity(), "sideways")

    def test_rotation_preserves_constant(self):
        """Test that rotations fix constant coadjoint elements."""
        b = VirCoadjoint(CircleField.constant(0.3), 1.0)
        moved = vir_coadjoint(b, CircleDiffeo.rotation(1.1))
        assert moved.u.distance(b.u) < 1e-14

    def test_active_then_passive_is_identity(self, rng, small_cfg):
        """Test that the passive action undoes the active one."""
        b = VirCoadjoint(random_field(rng, 3, 0.5), 1.0)
        g = random_diffeo(rng, 2, 0.2)
        there = vir_coadjoint(b, g, "finite-active", small_cfg)
        back = vir_coadjoint(there, g, "finite-passive", small_cfg)
        assert back.u.distance(b.u) < 1e-8

    def test_pairing_invariance(self, rng):
        """Test ⟨ad*_v b, u⟩ + ⟨b, [v, u]⟩ = 0 on random inputs."""
        for _ in range(10):
            b = VirCoadjoint(random_field(rng, 4), rng.normal())
            u = VirAdjoint(random_field(rng, 4), rng.normal())
            v = VirAdjoint(random_field(rng, 4), rng.normal())
            assert pairing_invariance_residual(b, u, v) < 1e-10

    def test_finite_pairing_invariance(self, rng):
        """Test ⟨Ad*_F b, x⟩ = ⟨b, Ad_F x⟩."""
        b = VirCoadjoint(random_field(rng, 3, 0.5), 1.0)
        x = VirAdjoint(random_field(rng, 3, 0.5), 0.2)
        g = random_diffeo(rng, 2, 0.2)
        assert finite_pairing_invariance_residual(b, x, g) < 1e-8

    def test_jacobi_identity(self, rng):
        """Test the Jacobi identity of the vector-field bracket."""
        fields = [random_field(rng, 3) for _ in range(3)]
        assert jacobi_bracket_residual(*fields) < 1e-11

    def test_kirillov_form_matches_nabla3(self, rng):
        """Test the Kirillov form through the covariant operator."""
        u, xi, eta = (random_field(rng, 4) for _ in range(3))
        assert kirillov_nabla3_residual(u, 0.7, xi, eta) < 1e-12

    def test_beta_shift(self, rng):
        """Test that the 2βξ′ term is a shift of u by β."""
        assert beta_shift_residual(random_field(rng, 3), random_field(rng, 3), 1.0, 0.4) < 1e-12


class TestKacMoody:
    """Tests for KMField, brackets and the loop-group action."""

    def test_structure_constants_so3(self):
        """Test that so(3) constants satisfy Jacobi and antisymmetry."""
        f = structure_constants("so3", 3)
        assert jacobi_residual(f) == 0.0
        np.testing.assert_array_equal(f, -np.swapaxes(f, 1, 2))

    @pytest.mark.parametrize("structure,dim", [("so3", 2), ("su7", 3)])
    def test_structure_constants_rejected(self, structure, dim):
        """Test unsupported algebras and wrong dimensions."""
        with pytest.raises(ConfigurationError):
            structure_constants(structure, dim)

    def test_representation_commutators(self):
        """Test [T_a, T_b] = f_abc T_c in the defining representation."""
        t = representation("so3", 3)
        f = structure_constants("so3", 3)
        for a in range(3):
            for b in range(3):
                commutator = t[a] @ t[b] - t[b] @ t[a]
                expected = np.einsum("c,cij->ij", f[a, b], t)
                np.testing.assert_allclose(commutator, expected, atol=1e-15)

    def test_wrong_component_count(self):
        """Test that so(3) fields need three components."""
        with pytest.raises(ConfigurationError):
            KMField((CircleField.zeros(), CircleField.zeros()))

    def test_dimension_mismatch(self):
        """Test that mixing representations raises ConfigurationError."""
        a = KMField.zeros(3, "so3")
        b = KMField.zeros(2, "abelian")
        with pytest.raises(ConfigurationError, match="dimension mismatch"):
            km_bracket(a, b)

    def test_bracket_is_antisymmetric(self, rng):
        """Test [Λ, A] = −[A, Λ]."""
        lam, a = random_km_field(rng), random_km_field(rng)
        assert km_bracket(lam, a).distance(km_bracket(a, lam).scale(-1.0)) < 1e-13

    def test_abelian_bracket_vanishes(self, rng):
        """Test that the abelian bracket is zero."""
        lam = random_km_field(rng, 2, "abelian")
        a = random_km_field(rng, 2, "abelian")
        assert km_bracket(lam, a).distance(KMField.zeros(2, "abelian")) == 0.0

    def test_killing_pairing_of_orthogonal_modes(self):
        """Test ⟨Tr(AB)⟩ for hand-picked components."""
        a = KMField((CircleField.cos(1), CircleField.zeros(), CircleField.zeros()))
        b = KMField((CircleField.cos(1), CircleField.sin(1), CircleField.zeros()))
        assert km_killing_pairing(a, b) == pytest.approx(0.5)

    def test_finite_action_of_zero(self, rng, small_cfg):
        """Test that the identity loop leaves A unchanged."""
        a = random_km_field(rng)
        moved = km_coadjoint(a, KMField.zeros(), config=small_cfg)
        assert moved.distance(a) < 1e-12

    def test_finite_action_linearizes(self, rng, small_cfg):
        """Test that a small loop acts to first order like the infinitesimal action."""
        a = random_km_field(rng, charge=0.8)
        lam = random_km_field(rng, amplitude=0.3)
        eps = 1e-5
        finite = km_coadjoint(a, lam.scale(eps), "finite", small_cfg)
        infinitesimal = km_coadjoint(a, lam, "infinitesimal")
        assert (finite - a).scale(1.0 / eps).distance(infinitesimal) < 1e-3

    def test_unknown_km_mode(self):
        """Test that an unknown mode raises ConfigurationError."""
        with pytest.raises(ConfigurationError):
            km_coadjoint(KMField.zeros(), KMField.zeros(), "sideways")


class TestSemidirect:
    """Tests for the Virasoro-Kac-Moody semidirect action."""

    def test_beta_requires_linear_center(self, rng, cfg):
        """Test that β ≠ 0 needs the linear center switched on."""
        d = VirCoadjoint(random_field(rng, 3), 1.0)
        with pytest.raises(ConfigurationError, match="linear_center"):
            semidirect_coadjoint(d, KMField.zeros(), CircleField.cos(1), KMField.zeros(), 0.5, cfg)

    def test_beta_with_linear_center(self, rng, cfg):
        """Test that β adds 2βξ′ to δD."""
        d = VirCoadjoint(random_field(rng, 3), 1.0)
        xi = CircleField.cos(1)
        plain, _ = semidirect_coadjoint(d, KMField.zeros(), xi, KMField.zeros())
        shifted, _ = semidirect_coadjoint(
            d, KMField.zeros(), xi, KMField.zeros(), 0.5, cfg.replace(linear_center=True)
        )
        assert (shifted - plain).distance(xi.derivative()) < 1e-14

    def test_shifted_variation_independent_of_gauge(self, rng):
        """Test that δD̃ does not depend on the gauge parameter Λ."""
        d = VirCoadjoint(random_field(rng, 3), 1.0)
        a = random_km_field(rng, charge=2.0)
        xi = random_field(rng, 3)
        residual = shift_invariance_residual(d, a, xi, random_km_field(rng), random_km_field(rng))
        assert residual < 1e-11

    def test_shift_transforms_as_coadjoint(self, rng):
        """Test that D̃ moves like a Virasoro coadjoint element."""
        d = VirCoadjoint(random_field(rng, 3), 0.5)
        a = random_km_field(rng, charge=2.0)
        xi = random_field(rng, 3)
        shifted = gauge_invariant_shift(d, a)
        expected = vir_coadjoint(shifted, xi, "infinitesimal").u
        assert shifted_variation(d, a, xi, KMField.zeros()).distance(expected) < 1e-11

    def test_shift_needs_charge(self, rng):
        """Test that a zero Kac-Moody charge raises DomainError."""
        d = VirCoadjoint(random_field(rng, 3), 1.0)
        with pytest.raises(DomainError):
            gauge_invariant_shift(d, KMField.zeros(charge=0.0))
