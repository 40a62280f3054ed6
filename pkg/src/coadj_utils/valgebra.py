"""
Virasoro, Kac-Moody and semidirect-product algebra operations.

Sign conventions used throughout:

* vector-field bracket  [ξ, η] = ξη′ − ξ′η
* Gelfand-Fuchs cocycle c(ξ, η) = ⟨ξ′η″⟩, with ⟨·⟩ the circle mean
* the central part of [(ξ, a), (η, a′)] is −c(ξ, η), so that
  ⟨ad*_ξ b, η⟩ = −⟨b, [ξ, η]⟩ for the coadjoint variation ξu′ + 2ξ′u + bξ‴
* Kac-Moody passive group element g = exp(−Λ), giving
  δA = −[Λ, A] + e⁻¹Λ′ with [Λ, A]_a = f_abc Λ_b A_c
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm, expm_frechet

from .circlefield import (
    CircleDiffeo,
    CircleField,
    compose,
    field_from_samples,
    grid,
    random_field,
)
from .config import ToolkitConfig, default_config
from .errors import ConfigurationError, DomainError, TruncationError

logger = logging.getLogger(__name__)

SUPPORTED_STRUCTURES = ("so3", "abelian")


# ----------------------------------------------------------------------
# element types
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class VirAdjoint:
    """Adjoint element (ξ d/dθ, a) of the Virasoro algebra."""

    xi: CircleField
    center: float = 0.0


@dataclass(frozen=True)
class VirCoadjoint:
    """Coadjoint element (u, b); the charge b never changes under the action."""

    u: CircleField
    charge: float = 1.0


def structure_constants(structure: str, dim: int) -> np.ndarray:
    """Totally antisymmetric f_abc for a supported Lie algebra."""
    if structure == "so3":
        if dim != 3:
            raise ConfigurationError(f"so3 has dimension 3, got {dim} components")
        f = np.zeros((3, 3, 3))
        for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            f[a, b, c] = 1.0
            f[a, c, b] = -1.0
        return f
    if structure == "abelian":
        return np.zeros((dim, dim, dim))
    raise ConfigurationError(
        f"Unsupported Lie algebra {structure!r}; choose one of {SUPPORTED_STRUCTURES}"
    )


def jacobi_residual(f: np.ndarray) -> float:
    """max |f_abe f_ecd + f_bce f_ead + f_cae f_ebd|."""
    total = (
        np.einsum("abe,ecd->abcd", f, f)
        + np.einsum("bce,ead->abcd", f, f)
        + np.einsum("cae,ebd->abcd", f, f)
    )
    return float(np.max(np.abs(total))) if total.size else 0.0


def representation(structure: str, dim: int) -> np.ndarray:
    """Defining-representation matrices T_a with [T_a, T_b] = f_abc T_c."""
    if structure == "so3":
        eps = structure_constants("so3", 3)
        return -eps
    return np.stack([np.diag(np.eye(dim)[a]) for a in range(dim)])


@dataclass(frozen=True)
class KMField:
    """Lie-algebra valued field A = A_a T_a with inverse level ``charge`` = e⁻¹."""

    components: Tuple[CircleField, ...]
    structure: str = "so3"
    charge: float = 1.0
    _f: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        f = structure_constants(self.structure, len(self.components))
        residual = jacobi_residual(f)
        if residual > 1e-12:
            raise ConfigurationError(f"structure constants violate Jacobi: {residual:.3e}")
        object.__setattr__(self, "_f", f)

    @classmethod
    def zeros(cls, dim: int = 3, structure: str = "so3", charge: float = 1.0) -> "KMField":
        return cls(tuple(CircleField.zeros() for _ in range(dim)), structure, charge)

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def structure_constants(self) -> np.ndarray:
        return self._f

    @property
    def bandlimit(self) -> int:
        return max(c.bandlimit for c in self.components)

    def with_components(self, components: Sequence[CircleField]) -> "KMField":
        return KMField(tuple(components), self.structure, self.charge)

    def derivative(self) -> "KMField":
        return self.with_components([c.derivative() for c in self.components])

    def distance(self, other: "KMField") -> float:
        _check_dims(self, other)
        return max(a.distance(b) for a, b in zip(self.components, other.components))

    def __add__(self, other: "KMField") -> "KMField":
        _check_dims(self, other)
        return self.with_components([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "KMField") -> "KMField":
        _check_dims(self, other)
        return self.with_components([a - b for a, b in zip(self.components, other.components)])

    def scale(self, factor) -> "KMField":
        """Multiply every component by a number or a CircleField."""
        return self.with_components([c * factor for c in self.components])


def _check_dims(a: KMField, b: KMField) -> None:
    if a.dim != b.dim or a.structure != b.structure:
        raise ConfigurationError(
            f"representation dimension mismatch: {a.structure}[{a.dim}] vs "
            f"{b.structure}[{b.dim}]"
        )


# ----------------------------------------------------------------------
# Virasoro
# ----------------------------------------------------------------------
def gf_cocycle(
    xi: CircleField, eta: CircleField, with_connection: Optional[CircleField] = None
) -> float:
    """Gelfand-Fuchs cocycle ⟨ξ′η″⟩, optionally extended by a connection Γ.

    The covariant version uses ∇ = (∂ − Γ)∂(∂ + Γ); its Γ-dependent part
    P_Γ = ∇ − ∂³ enters as ½⟨ξ P_Γ η − η P_Γ ξ⟩, which equals ⟨Σ(Γ)[ξ, η]⟩.
    """
    value = (xi.derivative() * eta.derivative(2)).integral_mean()
    if with_connection is None:
        return value

    gamma = with_connection

    def connection_part(f: CircleField) -> CircleField:
        # (∂ − Γ)∂(∂ + Γ)f − f‴
        inner = (f.derivative() + gamma * f).derivative()
        return inner.derivative() - gamma * inner - f.derivative(3)

    return value + 0.5 * (
        (xi * connection_part(eta)).integral_mean()
        - (eta * connection_part(xi)).integral_mean()
    )


def linear_cocycle(xi: CircleField, eta: CircleField) -> float:
    """Trivial cocycle ⟨ξ′η − ξη′⟩ carried by the linear center."""
    return (xi.derivative() * eta - xi * eta.derivative()).integral_mean()


def vector_bracket(xi: CircleField, eta: CircleField) -> CircleField:
    """ξη′ − ξ′η."""
    return xi * eta.derivative() - xi.derivative() * eta


def vir_bracket(
    x: VirAdjoint, y: VirAdjoint, linear_weight: float = 0.0
) -> VirAdjoint:
    """Bracket of two Virasoro adjoint elements.

    Args:
        x, y: Adjoint elements
        linear_weight: Coefficient of the linear cocycle (zero unless the
            linear center is switched on)
    """
    center = -gf_cocycle(x.xi, y.xi)
    if linear_weight:
        center += linear_weight * linear_cocycle(x.xi, y.xi)
    return VirAdjoint(vector_bracket(x.xi, y.xi), center)


def _realized_mode(k: int) -> Tuple[CircleField, CircleField]:
    # ξ_k = i e^{ikθ} = −sin kθ + i cos kθ, as (real, imaginary) fields
    sign = 1.0 if k >= 0 else -1.0
    return CircleField.sin(abs(k), -sign), CircleField.cos(abs(k))


def mode_bracket(m: int, n: int, central_charge: float) -> Tuple[int, float]:
    """Coefficients of [L_m, L_n] = (m − n) L_{m+n} + (c/12) m n² δ_{m+n,0}.

    Both are computed on the realization L_k ↦ ξ_k = i e^{ikθ}, split into
    real fields: the field coefficient is the projection of ``vector_bracket``
    onto ξ_{m+n}, and the central coefficient is c/12 times Im ⟨ξ_m′ξ_n″⟩,
    the Gelfand-Fuchs cocycle of the pair.
    """
    (a_m, b_m), (a_n, b_n) = _realized_mode(m), _realized_mode(n)
    bracket_re = vector_bracket(a_m, a_n) - vector_bracket(b_m, b_n)
    bracket_im = vector_bracket(a_m, b_n) + vector_bracket(b_m, a_n)
    a_k, b_k = _realized_mode(m + n)
    coefficient = (bracket_re * a_k + bracket_im * b_k).integral_mean()
    cocycle_im = gf_cocycle(a_m, b_n) + gf_cocycle(b_m, a_n)
    return int(round(coefficient)), central_charge / 12.0 * cocycle_im


def pairing(b: VirCoadjoint, x: VirAdjoint) -> float:
    """⟨(u, b), (ξ, a)⟩ = b·a + ⟨uξ⟩."""
    return b.charge * x.center + (b.u * x.xi).integral_mean()


def vir_coadjoint(
    b: VirCoadjoint,
    g,
    mode: str = "finite-active",
    config: Optional[ToolkitConfig] = None,
) -> VirCoadjoint:
    """Coadjoint action of a diffeo (finite) or vector field (infinitesimal).

    Args:
        b: Coadjoint element (u, b)
        g: CircleDiffeo for finite modes, VirAdjoint or CircleField for
            ``infinitesimal``
        mode: ``finite-active``, ``finite-passive`` or ``infinitesimal``

    Returns:
        finite-active: ((F′)² u∘F + b SF, b); finite-passive: the inverse of
        that map; infinitesimal: (ξu′ + 2ξ′u + bξ‴, b)
    """
    from .schwarzian import schwarzian

    cfg = config or default_config()
    if mode == "infinitesimal":
        xi = g.xi if isinstance(g, VirAdjoint) else g
        if not isinstance(xi, CircleField):
            raise TypeError("infinitesimal coadjoint action needs a vector field")
        return VirCoadjoint(coadjoint_variation(b.u, xi, b.charge), b.charge)
    if not isinstance(g, CircleDiffeo):
        raise TypeError(f"{mode} coadjoint action needs a CircleDiffeo")
    if mode == "finite-passive":
        g = g.inverse(cfg)
    elif mode != "finite-active":
        raise ConfigurationError(f"Unknown coadjoint mode: {mode}")
    slope = g.derivative_field()
    u = slope * slope * compose(b.u, g, cfg)
    if b.charge:
        u = u + b.charge * schwarzian(g, cfg)
    return VirCoadjoint(u.truncate(max(cfg.bandlimit, b.u.bandlimit)), b.charge)


def coadjoint_variation(u: CircleField, xi: CircleField, charge: float) -> CircleField:
    """ξu′ + 2ξ′u + bξ‴."""
    return xi * u.derivative() + 2.0 * xi.derivative() * u + charge * xi.derivative(3)


def nabla3(u: CircleField, xi: CircleField, q: float) -> CircleField:
    """Covariant third-order operator qξ‴ + 2uξ′ + u′ξ."""
    return q * xi.derivative(3) + 2.0 * u * xi.derivative() + u.derivative() * xi


def vir_adjoint(
    x: VirAdjoint, g: CircleDiffeo, config: Optional[ToolkitConfig] = None
) -> VirAdjoint:
    """Finite adjoint action dual to ``vir_coadjoint(..., 'finite-active')``.

    ((F′ξ)∘F⁻¹, a + ⟨SF·ξ⟩), so that ⟨Ad*_F b, x⟩ = ⟨b, Ad_F x⟩.
    """
    from .schwarzian import schwarzian

    cfg = config or default_config()
    pushed = compose(g.derivative_field() * x.xi, g.inverse(cfg), cfg)
    center = x.center + (schwarzian(g, cfg) * x.xi).integral_mean()
    return VirAdjoint(pushed, center)


def kirillov_form(b: VirCoadjoint, x: VirAdjoint, y: VirAdjoint) -> float:
    """Ω_b(x, y) = ⟨b, [x, y]⟩."""
    return pairing(b, vir_bracket(x, y))


# ----------------------------------------------------------------------
# identity residuals
# ----------------------------------------------------------------------
def pairing_invariance_residual(b: VirCoadjoint, u: VirAdjoint, v: VirAdjoint) -> float:
    """|⟨ad*_v b, u⟩ + ⟨b, ad_v u⟩| for the infinitesimal action."""
    variation = vir_coadjoint(b, v, "infinitesimal")
    lhs = pairing(VirCoadjoint(variation.u, 0.0), u)
    return abs(lhs + pairing(b, vir_bracket(v, u)))


def finite_pairing_invariance_residual(
    b: VirCoadjoint,
    x: VirAdjoint,
    g: CircleDiffeo,
    config: Optional[ToolkitConfig] = None,
) -> float:
    """|⟨Ad*_F b, x⟩ − ⟨b, Ad_F x⟩|."""
    cfg = config or default_config()
    lhs = pairing(vir_coadjoint(b, g, "finite-active", cfg), x)
    rhs = pairing(b, vir_adjoint(x, g, cfg))
    return abs(lhs - rhs)


def jacobi_bracket_residual(xi: CircleField, eta: CircleField, zeta: CircleField) -> float:
    """Sup-norm of the cyclic sum of nested vector-field brackets."""
    total = (
        vector_bracket(xi, vector_bracket(eta, zeta))
        + vector_bracket(eta, vector_bracket(zeta, xi))
        + vector_bracket(zeta, vector_bracket(xi, eta))
    )
    return total.max_abs()


def kirillov_nabla3_residual(
    u: CircleField, q: float, xi: CircleField, eta: CircleField
) -> float:
    """|½(⟨∇_u η, ξ⟩ − ⟨∇_u ξ, η⟩) − Ω_{(u,q)}(ξ, η)|."""
    lhs = 0.5 * (
        (nabla3(u, eta, q) * xi).integral_mean() - (nabla3(u, xi, q) * eta).integral_mean()
    )
    rhs = kirillov_form(VirCoadjoint(u, q), VirAdjoint(xi), VirAdjoint(eta))
    return abs(lhs - rhs)


def beta_shift_residual(u: CircleField, xi: CircleField, q: float, beta: float) -> float:
    """Variation with the 2βξ′ term against the variation of u + β without it."""
    with_term = coadjoint_variation(u, xi, q) + 2.0 * beta * xi.derivative()
    shifted = coadjoint_variation(u + beta, xi, q)
    return with_term.distance(shifted)


# ----------------------------------------------------------------------
# Kac-Moody
# ----------------------------------------------------------------------
def km_bracket(lam: KMField, a: KMField) -> KMField:
    """[Λ, A]_a = f_abc Λ_b A_c."""
    _check_dims(lam, a)
    f = lam.structure_constants
    out = []
    for i in range(a.dim):
        comp = CircleField.zeros()
        for j in range(a.dim):
            for k in range(a.dim):
                if f[i, j, k]:
                    comp = comp + f[i, j, k] * lam.components[j] * a.components[k]
        out.append(comp)
    return a.with_components(out)


def trace_product(a: KMField, b: KMField) -> CircleField:
    """Tr(AB) = Σ_a A_a B_a with the normalization Tr(T_a T_b) = δ_ab."""
    _check_dims(a, b)
    total = CircleField.zeros()
    for x, y in zip(a.components, b.components):
        total = total + x * y
    return total


def km_killing_pairing(a: KMField, b: KMField) -> float:
    return trace_product(a, b).integral_mean()


def km_variation(a: KMField, lam: KMField) -> KMField:
    """−[Λ, A] + e⁻¹Λ′."""
    bracket = km_bracket(lam, a)
    return a.with_components(
        [a.charge * dl - br for dl, br in zip(lam.derivative().components, bracket.components)]
    )


def km_coadjoint(
    a: KMField,
    g: KMField,
    mode: str = "finite",
    config: Optional[ToolkitConfig] = None,
) -> KMField:
    """Coadjoint action of the loop group element exp(−Λ) on A.

    The finite mode evaluates g A g⁻¹ − e⁻¹ ∂g g⁻¹ pointwise on an
    oversampled grid, with ∂g taken from the Fréchet derivative of expm.

    Raises:
        ConfigurationError: representation dimension mismatch
        TruncationError: the result is not resolved at the working bandlimit
    """
    _check_dims(a, g)
    if mode == "infinitesimal":
        return km_variation(a, g)
    if mode != "finite":
        raise ConfigurationError(f"Unknown Kac-Moody coadjoint mode: {mode}")

    cfg = config or default_config()
    n = max(cfg.bandlimit, a.bandlimit, g.bandlimit)
    n_points = cfg.oversampling * (2 * n + 1)
    theta = grid(n_points)
    basis = representation(a.structure, a.dim)
    norms = np.einsum("aij,aij->a", basis, basis)

    lam = np.array([c.evaluate(theta) for c in g.components])
    dlam = np.array([c.derivative().evaluate(theta) for c in g.components])
    vals = np.array([c.evaluate(theta) for c in a.components])

    out = np.empty((a.dim, n_points))
    for j in range(n_points):
        x = -np.einsum("a,aij->ij", lam[:, j], basis)
        dx = -np.einsum("a,aij->ij", dlam[:, j], basis)
        gmat, dg = expm_frechet(x, dx)
        ginv = expm(-x)
        amat = np.einsum("a,aij->ij", vals[:, j], basis)
        new = gmat @ amat @ ginv - a.charge * dg @ ginv
        out[:, j] = np.einsum("aij,ij->a", basis, new) / norms

    components = []
    for row in out:
        comp = field_from_samples(row, n)
        if comp.truncation_residual > cfg.truncation_tol:
            raise TruncationError(
                f"finite Kac-Moody action: truncation residual "
                f"{comp.truncation_residual:.3e} at bandlimit {n}",
                comp.truncation_residual,
            )
        components.append(comp)
    logger.debug("km_coadjoint: %d grid points, bandlimit %d", n_points, n)
    return a.with_components(components)


# ----------------------------------------------------------------------
# semidirect product
# ----------------------------------------------------------------------
def semidirect_coadjoint(
    d: VirCoadjoint,
    a: KMField,
    xi: CircleField,
    lam: KMField,
    beta: float = 0.0,
    config: Optional[ToolkitConfig] = None,
) -> Tuple[CircleField, KMField]:
    """Infinitesimal action of (ξ, Λ) on the pair (D, A).

    δD = 2ξ′D + D′ξ + qξ‴ + 2βξ′ − Tr(AΛ′)
    δA = A′ξ + ξ′A − [Λ, A] + e⁻¹Λ′

    Raises:
        ConfigurationError: nonzero β while the linear center is disabled
    """
    cfg = config or default_config()
    if beta and not cfg.linear_center:
        raise ConfigurationError(
            "nonzero beta requires linear_center=True in the configuration"
        )
    delta_d = coadjoint_variation(d.u, xi, d.charge) - trace_product(a, lam.derivative())
    if beta:
        delta_d = delta_d + 2.0 * beta * xi.derivative()
    transport = a.with_components(
        [c.derivative() * xi + xi.derivative() * c for c in a.components]
    )
    delta_a = transport + km_variation(a, lam)
    return delta_d, delta_a


def gauge_invariant_shift(d: VirCoadjoint, a: KMField) -> VirCoadjoint:
    """D̃ = D + (e/2) Tr(AA) with e = 1 / charge of A."""
    if a.charge == 0:
        raise DomainError("gauge-invariant shift needs a nonzero Kac-Moody charge")
    e = 1.0 / a.charge
    return VirCoadjoint(d.u + 0.5 * e * trace_product(a, a), d.charge)


def shifted_variation(
    d: VirCoadjoint,
    a: KMField,
    xi: CircleField,
    lam: KMField,
    beta: float = 0.0,
    config: Optional[ToolkitConfig] = None,
) -> CircleField:
    """δD̃ = δD + e Tr(A δA) induced by the semidirect action."""
    delta_d, delta_a = semidirect_coadjoint(d, a, xi, lam, beta, config)
    return delta_d + (1.0 / a.charge) * trace_product(a, delta_a)


def shift_invariance_residual(
    d: VirCoadjoint,
    a: KMField,
    xi: CircleField,
    lam_1: KMField,
    lam_2: KMField,
    config: Optional[ToolkitConfig] = None,
) -> float:
    """Distance between δD̃ computed with two different Λ."""
    first = shifted_variation(d, a, xi, lam_1, config=config)
    second = shifted_variation(d, a, xi, lam_2, config=config)
    return first.distance(second)


def random_km_field(
    rng: np.random.Generator,
    dim: int = 3,
    structure: str = "so3",
    bandlimit: int = 3,
    amplitude: float = 0.5,
    charge: float = 1.0,
) -> KMField:
    """Random KMField with 1/k² decay in every component."""
    comps = tuple(random_field(rng, bandlimit, amplitude) for _ in range(dim))
    return KMField(comps, structure, charge)
