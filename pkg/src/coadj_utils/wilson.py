"""
Diff-Wilson loops: monodromy of the Hill operator and of ∇⁽³⁾.

Hill:  ψ″ + (u/2q)ψ = 0, basis φ₁(0)=0, φ₁′(0)=1 and φ₂(0)=1, φ₂′(0)=0,
       M = [[φ₁′, φ₁], [φ₂′, φ₂]] at θ = 2π.
∇⁽³⁾:  qψ‴ + 2Dψ′ + D′ψ = 0, basis with initial jets (ψ, ψ′, ψ″) = e_i,
       row i of M holds the jet of the i-th solution at θ = 2π.

Both operators lack the next-to-leading derivative, so det M = 1. The Hill
potential u = D makes products of Hill solutions solve the ∇⁽³⁾ equation.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp

from .circlefield import CircleDiffeo, CircleField
from .config import ToolkitConfig, default_config
from .errors import DomainError, IntegrationError, JetConditionError
from .valgebra import VirCoadjoint, vir_coadjoint

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi

_PRODUCT_PAIRS = ((0, 0), (0, 1), (1, 1))
_PRODUCT_RTOL, _PRODUCT_ATOL = 1e-13, 1e-14
_PRODUCT_WARN = 1e-6

Potential = Union[CircleField, float]


@dataclass(frozen=True)
class Monodromy:
    """Monodromy matrix with integrator metadata."""

    matrix: np.ndarray
    operator: str
    steps: int = 0
    rtol: float = 0.0
    error_estimate: Optional[float] = None
    theta: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    trajectory: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    # relative distance from Sym² of the Hill monodromy (∇⁽³⁾ only)
    product_residual: Optional[float] = None

    @property
    def order(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.matrix))

    def distance(self, other: Union["Monodromy", np.ndarray]) -> float:
        """Largest entrywise difference."""
        other_matrix = other.matrix if isinstance(other, Monodromy) else np.asarray(other)
        return float(np.max(np.abs(self.matrix - other_matrix)))

    def is_identity(self, tol: float = 1e-7) -> bool:
        return self.distance(np.eye(self.order)) <= tol

    def to_dict(self) -> Dict:
        return {
            "operator": self.operator,
            "order": self.order,
            "matrix": self.matrix.tolist(),
            "determinant": self.determinant,
            "steps": self.steps,
            "rtol": self.rtol,
            "error_estimate": self.error_estimate,
            "product_residual": self.product_residual,
        }


@dataclass(frozen=True)
class OrbitLabel:
    """First-type orbit of a constant coadjoint element."""

    omega: float
    branch: str
    kind: str
    n: Optional[int]
    stabilizer: Tuple[str, ...]
    note: str = ""

    def to_dict(self) -> Dict:
        return {
            "omega": self.omega,
            "branch": self.branch,
            "kind": self.kind,
            "n": self.n,
            "stabilizer": list(self.stabilizer),
            "note": self.note,
        }


# ----------------------------------------------------------------------
# integration helpers
# ----------------------------------------------------------------------
def _as_callables(d: Potential) -> Tuple[Callable[[float], float], Callable[[float], float]]:
    if isinstance(d, CircleField):
        deriv = d.derivative()
        return d.evaluate, deriv.evaluate
    value = float(d)
    return (lambda _th: value), (lambda _th: 0.0)


def _integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    cfg: ToolkitConfig,
    rtol: Optional[float] = None,
    dense: bool = False,
):
    rtol = cfg.ode_rtol if rtol is None else rtol
    sol = solve_ivp(
        rhs,
        (0.0, TWO_PI),
        y0,
        method=cfg.ode_method,
        rtol=rtol,
        atol=cfg.ode_atol,
        dense_output=dense,
    )
    if not sol.success:
        raise IntegrationError(f"monodromy integration failed: {sol.message}")
    return sol


def _refined_rtol(cfg: ToolkitConfig) -> float:
    return max(cfg.ode_rtol / 256.0, 1e-14)


def _check_q(q: float) -> None:
    if q == 0:
        raise DomainError("monodromy needs a nonzero central charge q")


def _hill_rhs(u: Potential, q: float) -> Callable[[float, np.ndarray], np.ndarray]:
    value, _ = _as_callables(u)

    def rhs(th: float, y: np.ndarray) -> np.ndarray:
        v = value(th) / (2.0 * q)
        return np.array([y[1], -v * y[0], y[3], -v * y[2]])

    return rhs


def _nabla3_rhs(d: Potential, q: float) -> Callable[[float, np.ndarray], np.ndarray]:
    value, slope = _as_callables(d)

    def rhs(th: float, y: np.ndarray) -> np.ndarray:
        dv, ds = value(th), slope(th)
        y = y.reshape(3, 3)
        out = np.empty_like(y)
        out[:, 0] = y[:, 1]
        out[:, 1] = y[:, 2]
        out[:, 2] = -(2.0 * dv * y[:, 1] + ds * y[:, 0]) / q
        return out.reshape(-1)

    return rhs


def _hill_matrix(y: np.ndarray) -> np.ndarray:
    return np.array([[y[1], y[0]], [y[3], y[2]]])


def _monodromy(
    operator: str,
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    to_matrix: Callable[[np.ndarray], np.ndarray],
    cfg: ToolkitConfig,
    estimate_error: bool,
    n_samples: int,
) -> Monodromy:
    sol = _integrate(rhs, y0, cfg, dense=n_samples > 0)
    matrix = to_matrix(sol.y[:, -1])
    error = None
    if estimate_error:
        refined = _integrate(rhs, y0, cfg, rtol=_refined_rtol(cfg))
        error = float(np.max(np.abs(to_matrix(refined.y[:, -1]) - matrix)))
    theta = trajectory = None
    if n_samples > 0:
        theta = np.linspace(0.0, TWO_PI, n_samples)
        trajectory = sol.sol(theta).T
    logger.debug("%s monodromy: %d RHS evaluations, error estimate %s", operator, sol.nfev, error)
    return Monodromy(matrix, operator, int(sol.nfev), cfg.ode_rtol, error, theta, trajectory)


# ----------------------------------------------------------------------
# monodromy matrices
# ----------------------------------------------------------------------
def monodromy_hill(
    u: Potential,
    q: float,
    config: Optional[ToolkitConfig] = None,
    estimate_error: bool = True,
    n_samples: int = 0,
) -> Monodromy:
    """Monodromy of ψ″ + (u/2q)ψ = 0 over one period.

    Args:
        u: Potential field (or a constant)
        q: Central charge, nonzero
        estimate_error: Re-integrate with a tighter tolerance and record the change
        n_samples: Store the dense trajectory (φ₁, φ₁′, φ₂, φ₂′) at this many points
    """
    _check_q(q)
    cfg = config or default_config()
    y0 = np.array([0.0, 1.0, 1.0, 0.0])
    return _monodromy(
        "hill", _hill_rhs(u, q), y0, _hill_matrix, cfg, estimate_error, n_samples
    )


def monodromy_nabla3(
    d: Potential,
    q: float,
    config: Optional[ToolkitConfig] = None,
    estimate_error: bool = True,
    n_samples: int = 0,
    check_products: bool = True,
) -> Monodromy:
    """Monodromy of qψ‴ + 2Dψ′ + D′ψ = 0 over one period.

    With ``check_products`` the Hill monodromy at u = D is integrated too and
    the relative distance of M from its symmetric square is stored as
    ``product_residual``; a distance above 1e-6 is logged as a warning.
    """
    _check_q(q)
    cfg = config or default_config()
    result = _monodromy(
        "nabla3",
        _nabla3_rhs(d, q),
        np.eye(3).reshape(-1),
        lambda y: y.reshape(3, 3).copy(),
        cfg,
        estimate_error,
        n_samples,
    )
    if not check_products:
        return result
    value, _ = _as_callables(d)
    predicted = hill_symmetric_square(monodromy_hill(d, q, cfg, estimate_error=False), value(0.0), q)
    residual = float(np.max(np.abs(result.matrix - predicted))) / max(1.0, float(np.max(np.abs(predicted))))
    if residual > _PRODUCT_WARN:
        logger.warning("nabla3 monodromy departs from Sym2 of the Hill monodromy by %.2e", residual)
    return dataclasses.replace(result, product_residual=residual)


def _product_jets(f: Tuple[float, float], df: Tuple[float, float], v: float) -> np.ndarray:
    # rows (g, g', g'') of g = f_i f_j, using f'' = -V f
    return np.array(
        [
            [f[i] * f[j], df[i] * f[j] + f[i] * df[j], 2.0 * df[i] * df[j] - 2.0 * v * f[i] * f[j]]
            for i, j in _PRODUCT_PAIRS
        ]
    )


def hill_symmetric_square(hill: Monodromy, d0: float, q: float) -> np.ndarray:
    """∇⁽³⁾ monodromy predicted from the Hill monodromy at u = D.

    f₁², f₁f₂, f₂² solve the ∇⁽³⁾ equation; their jets at 2π follow from the
    Hill matrix and V = D(0)/2q, and M = J(0)⁻¹ J(2π) in the unit-jet basis.

    Args:
        hill: Hill monodromy [[f₁′, f₁], [f₂′, f₂]] at 2π
        d0: D(0), equal to D(2π)
        q: Central charge
    """
    _check_q(q)
    v = d0 / (2.0 * q)
    m = hill.matrix
    start = _product_jets((0.0, 1.0), (1.0, 0.0), v)
    end = _product_jets((m[0, 1], m[1, 1]), (m[0, 0], m[1, 0]), v)
    return np.linalg.solve(start, end)


def first_type_closed_form(omega: float) -> Monodromy:
    """Closed-form ∇⁽³⁾ monodromy for the constant element with ω = √(2D₀/q)."""
    if omega == 0:
        raise DomainError("omega = 0 is the degenerate D = 0 case; integrate it instead")
    omega = abs(float(omega))
    if abs(omega - round(omega)) < 1e-12:
        return Monodromy(np.eye(3), "closed-form")
    s, c = np.sin(TWO_PI * omega), np.cos(TWO_PI * omega)
    matrix = np.array(
        [
            [1.0, 0.0, 0.0],
            [s / omega, c, -omega * s],
            [(1.0 - c) / omega**2, s / omega, c],
        ]
    )
    return Monodromy(matrix, "closed-form")


# ----------------------------------------------------------------------
# structure checks
# ----------------------------------------------------------------------
def hill_product_residual(
    d: Potential, q: float, config: Optional[ToolkitConfig] = None, n_points: int = 200
) -> float:
    """Compare products of Hill solutions (potential u = D) with ∇⁽³⁾ solutions.

    The Hill basis and the three ∇⁽³⁾ solutions sharing the initial jets of
    f₁², f₁f₂ and f₂² are integrated as one system, so both see the same
    steps. Returns the largest deviation on a dense grid, relative to the
    size of the products (floored at 1).
    """
    _check_q(q)
    cfg = config or default_config()
    value, _ = _as_callables(d)
    hill_rhs = _hill_rhs(d, q)
    nabla_rhs = _nabla3_rhs(d, q)

    v0 = value(0.0) / (2.0 * q)
    jets = _product_jets((0.0, 1.0), (1.0, 0.0), v0)

    def joint(th: float, y: np.ndarray) -> np.ndarray:
        return np.concatenate([hill_rhs(th, y[:4]), nabla_rhs(th, y[4:])])

    sol = solve_ivp(
        joint,
        (0.0, TWO_PI),
        np.concatenate([[0.0, 1.0, 1.0, 0.0], jets.reshape(-1)]),
        method=cfg.ode_method,
        rtol=min(cfg.ode_rtol, _PRODUCT_RTOL),
        atol=min(cfg.ode_atol, _PRODUCT_ATOL),
        dense_output=True,
    )
    if not sol.success:
        raise IntegrationError(f"Hill product integration failed: {sol.message}")

    states = sol.sol(np.linspace(0.0, TWO_PI, n_points))
    f = (states[0], states[2])
    third = states[4:].reshape(3, 3, -1)
    worst = 0.0
    for k, (i, j) in enumerate(_PRODUCT_PAIRS):
        product = f[i] * f[j]
        scale = max(1.0, float(np.max(np.abs(product))))
        worst = max(worst, float(np.max(np.abs(third[k, 0] - product))) / scale)
    logger.debug("hill product residual %.2e (%d RHS evaluations)", worst, sol.nfev)
    return worst


def diff0_invariance_residual(
    d: Potential,
    q: float,
    phi: CircleDiffeo,
    operator: str = "nabla3",
    enforce_jets: bool = True,
    config: Optional[ToolkitConfig] = None,
) -> float:
    """‖M[D^φ] − M[D]‖ for a base-point preserving diffeo φ.

    D^φ = (φ′)² D∘φ + q Sφ. ∇⁽³⁾ needs φ(0)=0, φ′(0)=1, φ″(0)=φ‴(0)=0;
    Hill needs the first three conditions.

    Raises:
        JetConditionError: ``enforce_jets`` is set and φ violates the conditions
    """
    cfg = config or default_config()
    if operator not in ("nabla3", "hill"):
        raise ValueError(f"Unsupported operator: {operator}")
    order = 3 if operator == "nabla3" else 2
    defects = phi.base_point_defects(order)
    if max(defects) > cfg.jet_tol:
        message = f"diffeo violates Diff0 jet conditions for {operator}: {defects}"
        if enforce_jets:
            raise JetConditionError(message)
        logger.warning("%s (residual reported as a negative control)", message)

    field_d = d if isinstance(d, CircleField) else CircleField.constant(float(d))
    transformed = vir_coadjoint(VirCoadjoint(field_d, q), phi, "finite-active", cfg).u
    monodromy = monodromy_nabla3 if operator == "nabla3" else monodromy_hill
    before = monodromy(field_d, q, cfg, estimate_error=False)
    after = monodromy(transformed, q, cfg, estimate_error=False)
    return before.distance(after)


# ----------------------------------------------------------------------
# orbit classification
# ----------------------------------------------------------------------
def classify_orbit(d0: float, q: float, integer_tol: float = 1e-9) -> OrbitLabel:
    """Orbit type of the constant element (D₀, q) from ω = √(2D₀/q).

    D₀ = 0 gets the ``degenerate`` branch with stabilizer L₀ alone: its
    isotropy equation qξ‴ = 0 has only constant periodic solutions. The
    Möbius fields 1, cos θ, sin θ stabilize the ω = 1 element D₀ = q/2,
    which is labelled as the n = 1 orbit, not the D₀ = 0 one.
    """
    if q == 0:
        raise DomainError("orbit classification needs a nonzero central charge q")
    ratio = 2.0 * d0 / q
    if ratio == 0:
        return OrbitLabel(
            0.0,
            "degenerate",
            "Diff S1/S1",
            None,
            ("L_0",),
            "D0 = 0: isotropy q xi''' = 0 leaves only constants; monodromy is unipotent",
        )
    if ratio < 0:
        return OrbitLabel(
            float(np.sqrt(-ratio)), "imaginary", "Diff S1/S1", None, ("L_0",),
            "2 D0 / q < 0: hyperbolic monodromy",
        )
    omega = float(np.sqrt(ratio))
    n = int(round(omega))
    if n >= 1 and abs(omega - n) <= integer_tol:
        return OrbitLabel(
            omega, "real", f"Diff S1/SL(2,R)^({n})", n, ("L_0", f"L_{n}", f"L_-{n}")
        )
    return OrbitLabel(omega, "real", "Diff S1/S1", None, ("L_0",))


def orbit_stabilizer(label: OrbitLabel) -> str:
    """Human-readable description of the stabilizer algebra."""
    span = ", ".join(label.stabilizer)
    if label.n:
        return f"span{{{span}}}: n-fold cover of SL(2,R) generated by 1, cos({label.n}θ), sin({label.n}θ)"
    return f"span{{{span}}}: rigid rotations"


def omega_sweep(
    omegas: Iterable[float], q: float = 1.0, config: Optional[ToolkitConfig] = None
) -> List[Dict[str, float]]:
    """Closed form against integration along a sweep of ω.

    Each row records the orbit type, the distance of M from the identity
    and the closed-form/ODE disagreement; the identity is reached only at
    integer ω, where the stabilizer jumps from one to three dimensions.
    """
    cfg = config or default_config()
    rows = []
    for omega in omegas:
        d0 = 0.5 * q * omega**2
        integrated = monodromy_nabla3(d0, q, cfg, estimate_error=False)
        closed = first_type_closed_form(omega)
        label = classify_orbit(d0, q)
        rows.append(
            {
                "omega": float(omega),
                "kind": label.kind,
                "stabilizer_dim": len(label.stabilizer),
                "distance_to_identity": closed.distance(np.eye(3)),
                "closed_vs_ode": integrated.distance(closed),
            }
        )
    return rows
