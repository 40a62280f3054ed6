"""
Band-limited functions and diffeomorphisms of the circle.

A ``CircleField`` stores the Fourier modes c_0..c_N of a real function on
[0, 2π); negative modes are implied by c_{-k} = conj(c_k). A ``CircleDiffeo``
stores f(θ) = θ + h(θ) through its periodic displacement h, so the winding
f(θ + 2π) = f(θ) + 2π holds exactly.

Linear operations and products are exact. Pointwise nonlinear operations
(composition, division, flows) are resampled on an oversampled grid and
re-truncated; the dropped spectral weight is kept in ``truncation_residual``.
"""

from __future__ import annotations

import logging
from typing import Callable, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp

from .config import ToolkitConfig, default_config
from .errors import (
    IntegrationError,
    JetConditionError,
    NonFiniteInputError,
    OrientationError,
    TruncationError,
)

logger = logging.getLogger(__name__)

Number = Union[int, float, np.floating]


class CircleField:
    """Real band-limited function on the circle."""

    __slots__ = ("_modes", "truncation_residual")

    def __init__(self, modes: Sequence[complex], truncation_residual: float = 0.0):
        """
        Args:
            modes: Coefficients c_0..c_N (non-negative wavenumbers only)
            truncation_residual: Spectral weight dropped when this field was produced
        """
        arr = np.array(modes, dtype=complex).reshape(-1)
        if arr.size == 0:
            arr = np.zeros(1, dtype=complex)
        if not np.all(np.isfinite(arr)):
            raise NonFiniteInputError("CircleField modes contain NaN or infinity")
        arr[0] = arr[0].real
        arr.setflags(write=False)
        self._modes = arr
        self.truncation_residual = float(truncation_residual)

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------
    @classmethod
    def zeros(cls, bandlimit: int = 0) -> "CircleField":
        return cls(np.zeros(bandlimit + 1, dtype=complex))

    @classmethod
    def constant(cls, value: Number, bandlimit: int = 0) -> "CircleField":
        modes = np.zeros(bandlimit + 1, dtype=complex)
        modes[0] = value
        return cls(modes)

    @classmethod
    def from_full_modes(cls, full: Sequence[complex]) -> "CircleField":
        """Build from the symmetric array c_{-N}..c_N (imaginary residue discarded)."""
        full = np.asarray(full, dtype=complex)
        n = (full.size - 1) // 2
        positive = full[n:]
        negative = full[n::-1]
        # average with the conjugate partner so the result is exactly real
        return cls(0.5 * (positive + np.conj(negative)))

    @classmethod
    def cos(cls, k: int, amplitude: float = 1.0) -> "CircleField":
        modes = np.zeros(k + 1, dtype=complex)
        modes[k] += 0.5 * amplitude if k else amplitude
        return cls(modes)

    @classmethod
    def sin(cls, k: int, amplitude: float = 1.0) -> "CircleField":
        modes = np.zeros(k + 1, dtype=complex)
        if k:
            modes[k] = -0.5j * amplitude
        return cls(modes)

    # ------------------------------------------------------------------
    # basic accessors
    # ------------------------------------------------------------------
    @property
    def modes(self) -> np.ndarray:
        """Coefficients c_0..c_N (read-only view)."""
        return self._modes

    @property
    def bandlimit(self) -> int:
        return self._modes.size - 1

    def full_modes(self) -> np.ndarray:
        """Symmetric coefficient array c_{-N}..c_N."""
        return np.concatenate([np.conj(self._modes[:0:-1]), self._modes])

    def wavenumbers(self) -> np.ndarray:
        return np.arange(self._modes.size)

    def coefficient(self, k: int) -> complex:
        """c_k for any integer k (zero beyond the bandlimit)."""
        if abs(k) > self.bandlimit:
            return 0j
        return self._modes[k] if k >= 0 else np.conj(self._modes[-k])

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------
    def evaluate(self, theta: Union[Number, np.ndarray]) -> Union[float, np.ndarray]:
        """Direct Fourier sum at arbitrary points."""
        scalar = np.ndim(theta) == 0
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        k = self.wavenumbers()[1:]
        value = np.full(th.shape, self._modes[0].real)
        if k.size:
            phases = np.exp(1j * np.multiply.outer(th, k))
            value = value + 2.0 * np.real(phases @ self._modes[1:])
        return float(value[0]) if scalar else value

    __call__ = evaluate

    def samples(self, n_points: Optional[int] = None) -> np.ndarray:
        """Values on the uniform grid θ_j = 2πj/n_points."""
        n_points = 2 * self.bandlimit + 1 if n_points is None else n_points
        if n_points < 2 * self.bandlimit + 1:
            raise ValueError(
                f"grid of {n_points} points cannot resolve bandlimit {self.bandlimit}"
            )
        spectrum = np.zeros(n_points // 2 + 1, dtype=complex)
        spectrum[: self._modes.size] = self._modes
        return np.fft.irfft(spectrum * n_points, n=n_points)

    def max_abs(self, n_points: Optional[int] = None) -> float:
        """Sup norm estimated on a 4x oversampled grid."""
        n_points = n_points or 4 * (2 * self.bandlimit + 1)
        return float(np.max(np.abs(self.samples(n_points))))

    # ------------------------------------------------------------------
    # calculus
    # ------------------------------------------------------------------
    def derivative(self, order: int = 1) -> "CircleField":
        if order < 0:
            raise ValueError(f"derivative order must be non-negative, got {order}")
        factor = (1j * self.wavenumbers()) ** order
        return CircleField(self._modes * factor, self.truncation_residual)

    def antiderivative(self) -> "CircleField":
        """Zero-mean primitive of f - mean(f)."""
        k = self.wavenumbers().astype(float)
        modes = np.zeros_like(self._modes)
        modes[1:] = self._modes[1:] / (1j * k[1:])
        return CircleField(modes, self.truncation_residual)

    def integral_mean(self) -> float:
        """(1/2π)∫ f dθ."""
        return float(self._modes[0].real)

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------
    def _padded(self, bandlimit: int) -> np.ndarray:
        out = np.zeros(bandlimit + 1, dtype=complex)
        out[: self._modes.size] = self._modes
        return out

    def __add__(self, other: Union["CircleField", Number]) -> "CircleField":
        if isinstance(other, CircleField):
            n = max(self.bandlimit, other.bandlimit)
            return CircleField(
                self._padded(n) + other._padded(n),
                self.truncation_residual + other.truncation_residual,
            )
        modes = self._modes.copy()
        modes[0] += other
        return CircleField(modes, self.truncation_residual)

    __radd__ = __add__

    def __neg__(self) -> "CircleField":
        return CircleField(-self._modes, self.truncation_residual)

    def __sub__(self, other: Union["CircleField", Number]) -> "CircleField":
        return self + (-other)

    def __rsub__(self, other: Number) -> "CircleField":
        return (-self) + other

    def __mul__(self, other: Union["CircleField", Number]) -> "CircleField":
        if isinstance(other, CircleField):
            # exact product: linear convolution of the symmetric spectra
            full = np.convolve(self.full_modes(), other.full_modes())
            return CircleField.from_full_modes(full)._with_residual(
                self.truncation_residual * other.max_abs()
                + other.truncation_residual * self.max_abs()
            )
        return CircleField(self._modes * other, self.truncation_residual * abs(other))

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "CircleField":
        return self * (1.0 / other)

    def __pow__(self, power: int) -> "CircleField":
        if not isinstance(power, (int, np.integer)) or power < 0:
            raise ValueError(f"only non-negative integer powers are exact, got {power}")
        result = CircleField.constant(1.0)
        for _ in range(power):
            result = result * self
        return result

    def _with_residual(self, residual: float) -> "CircleField":
        return CircleField(self._modes, residual)

    # ------------------------------------------------------------------
    # truncation / comparison
    # ------------------------------------------------------------------
    def truncate(self, bandlimit: int) -> "CircleField":
        """Keep modes up to ``bandlimit``; dropped weight is added to the residual."""
        if bandlimit >= self.bandlimit:
            return CircleField(self._padded(bandlimit), self.truncation_residual)
        dropped = 2.0 * float(np.sum(np.abs(self._modes[bandlimit + 1:])))
        return CircleField(self._modes[: bandlimit + 1], self.truncation_residual + dropped)

    def trimmed(self, tol: float = 0.0) -> "CircleField":
        """Drop trailing modes with magnitude not exceeding ``tol``."""
        nonzero = np.nonzero(np.abs(self._modes) > tol)[0]
        top = int(nonzero[-1]) if nonzero.size else 0
        return self.truncate(top)

    def distance(self, other: "CircleField") -> float:
        """Sup-norm bound Σ|c_k - d_k| over all modes."""
        n = max(self.bandlimit, other.bandlimit)
        diff = self._padded(n) - other._padded(n)
        return float(abs(diff[0]) + 2.0 * np.sum(np.abs(diff[1:])))

    def allclose(self, other: "CircleField", tol: float = 1e-10) -> bool:
        return self.distance(other) <= tol

    def __repr__(self) -> str:
        return f"CircleField(bandlimit={self.bandlimit}, mean={self.integral_mean():.6g})"


# ----------------------------------------------------------------------
# functional interface
# ----------------------------------------------------------------------
def field_from_samples(
    values: Iterable[float], bandlimit: Optional[int] = None
) -> CircleField:
    """Fit the modes of real samples on the grid θ_j = 2πj/M.

    Args:
        values: M real samples, M >= 2N + 1
        bandlimit: N; defaults to the largest resolvable (M - 1) // 2

    Returns:
        CircleField whose ``samples(M)`` reproduces ``values`` when no energy
        sits above the bandlimit
    """
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
    if np.iscomplexobj(arr):
        raise NonFiniteInputError("samples must be real")
    arr = arr.astype(float)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInputError("samples contain NaN or infinity")
    n_points = arr.size
    max_band = (n_points - 1) // 2
    bandlimit = max_band if bandlimit is None else bandlimit
    if bandlimit > max_band:
        raise ValueError(f"{n_points} samples cannot resolve bandlimit {bandlimit}")
    spectrum = np.fft.rfft(arr) / n_points
    dropped = 2.0 * float(np.sum(np.abs(spectrum[bandlimit + 1:])))
    return CircleField(spectrum[: bandlimit + 1], dropped)


def derivative(f: CircleField, order: int = 1) -> CircleField:
    return f.derivative(order)


def integral_mean(f: CircleField) -> float:
    return f.integral_mean()


def grid(n_points: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n_points) / n_points


def resample(
    func: Callable[[np.ndarray], np.ndarray],
    bandlimit: int,
    config: Optional[ToolkitConfig] = None,
    what: str = "pointwise operation",
) -> CircleField:
    """Sample ``func`` on an oversampled grid and re-truncate to ``bandlimit``.

    Raises:
        TruncationError: if the dropped spectral weight exceeds the tolerance
    """
    cfg = config or default_config()
    n_points = cfg.oversampling * (2 * bandlimit + 1)
    values = np.asarray(func(grid(n_points)), dtype=float)
    field = field_from_samples(values, bandlimit)
    if field.truncation_residual > cfg.truncation_tol:
        raise TruncationError(
            f"{what}: truncation residual {field.truncation_residual:.3e} exceeds "
            f"tolerance {cfg.truncation_tol:.1e} at bandlimit {bandlimit}",
            field.truncation_residual,
        )
    logger.debug("%s resampled at N=%d, residual %.2e", what, bandlimit, field.truncation_residual)
    return field


def pointwise(
    func: Callable[..., np.ndarray],
    *fields: CircleField,
    bandlimit: Optional[int] = None,
    config: Optional[ToolkitConfig] = None,
) -> CircleField:
    """Apply a numpy ufunc-like function pointwise to fields."""
    cfg = config or default_config()
    n = bandlimit or max([cfg.bandlimit] + [f.bandlimit for f in fields])
    return resample(lambda th: func(*(f.evaluate(th) for f in fields)), n, cfg)


def reciprocal(f: CircleField, config: Optional[ToolkitConfig] = None) -> CircleField:
    """1/f for a field bounded away from zero."""
    cfg = config or default_config()
    n_points = cfg.oversampling * (2 * f.bandlimit + 1)
    if np.min(np.abs(f.samples(n_points))) < cfg.min_derivative:
        raise ZeroDivisionError("reciprocal of a field that (nearly) vanishes")
    return pointwise(lambda v: 1.0 / v, f, config=cfg)


# ----------------------------------------------------------------------
# diffeomorphisms
# ----------------------------------------------------------------------
class CircleDiffeo:
    """Orientation-preserving circle map f(θ) = θ + h(θ)."""

    __slots__ = ("_h",)

    def __init__(
        self,
        displacement: CircleField,
        check: bool = True,
        config: Optional[ToolkitConfig] = None,
    ):
        """
        Args:
            displacement: Periodic part h of f(θ) = θ + h(θ)
            check: Verify f' > 0 on a dense grid
            config: Tolerances (default configuration if None)
        """
        self._h = displacement
        if check:
            cfg = config or default_config()
            n_points = cfg.oversampling * (2 * displacement.bandlimit + 1)
            slope = 1.0 + displacement.derivative().samples(n_points)
            low = float(np.min(slope))
            if low <= 0.0:
                raise OrientationError(
                    f"circle map is not orientation preserving: min f' = {low:.3e}"
                )

    @classmethod
    def identity(cls) -> "CircleDiffeo":
        return cls(CircleField.zeros(), check=False)

    @classmethod
    def rotation(cls, angle: float) -> "CircleDiffeo":
        return cls(CircleField.constant(angle), check=False)

    @classmethod
    def from_displacement(
        cls, h: CircleField, config: Optional[ToolkitConfig] = None
    ) -> "CircleDiffeo":
        return cls(h, check=True, config=config)

    @property
    def displacement(self) -> CircleField:
        return self._h

    @property
    def bandlimit(self) -> int:
        return self._h.bandlimit

    def __call__(self, theta: Union[Number, np.ndarray]) -> Union[float, np.ndarray]:
        return theta + self._h.evaluate(theta)

    def derivative_field(self, order: int = 1) -> CircleField:
        """f^{(order)} as a periodic field (order >= 1)."""
        if order < 1:
            raise ValueError("derivative_field needs order >= 1")
        d = self._h.derivative(order)
        return d + 1.0 if order == 1 else d

    def jet(self, at: float = 0.0, order: int = 3) -> Tuple[float, ...]:
        """(f(a), f'(a), ..., f^{(order)}(a)) by spectral evaluation."""
        values = [float(self(at))]
        for n in range(1, order + 1):
            values.append(float(self.derivative_field(n).evaluate(at)))
        return tuple(values)

    def base_point_defects(self, order: int = 2, at: float = 0.0) -> Tuple[float, ...]:
        """Deviations of the jet at ``at`` from the identity jet (a, 1, 0, 0, ...)."""
        jet = self.jet(at, order)
        expected = (at, 1.0) + (0.0,) * (order - 1)
        return tuple(abs(j - e) for j, e in zip(jet, expected))

    def is_diff0(self, order: int = 2, tol: Optional[float] = None) -> bool:
        tol = default_config().jet_tol if tol is None else tol
        return max(self.base_point_defects(order)) <= tol

    def compose(
        self, other: "CircleDiffeo", config: Optional[ToolkitConfig] = None
    ) -> "CircleDiffeo":
        """self ∘ other, i.e. θ ↦ self(other(θ))."""
        h = other.displacement + compose(self._h, other, config)
        return CircleDiffeo(h, check=True, config=config)

    def inverse(
        self, config: Optional[ToolkitConfig] = None, max_bandlimit: Optional[int] = None
    ) -> "CircleDiffeo":
        """Inverse map by Newton iteration on the grid.

        The inverse of a band-limited map is not band-limited. Its bandlimit
        starts at the working one and doubles, up to ``max_bandlimit``
        (default four times the start), until the truncation check passes.

        Raises:
            TruncationError: still unresolved at ``max_bandlimit``
        """
        cfg = config or default_config()
        n = max(cfg.bandlimit, self.bandlimit)
        limit = max_bandlimit or 4 * n
        h, dh = self._h, self._h.derivative()

        def displacement(th: np.ndarray) -> np.ndarray:
            k = -h.evaluate(th)
            for _ in range(60):
                step = (th + k + h.evaluate(th + k) - th) / (1.0 + dh.evaluate(th + k))
                k = k - step
                if np.max(np.abs(step)) < 1e-15:
                    break
            return k

        while True:
            try:
                return CircleDiffeo(resample(displacement, n, cfg, "inverse diffeo"), config=cfg)
            except TruncationError as exc:
                if 2 * n > limit:
                    raise
                logger.debug("inverse diffeo unresolved at N=%d (%.2e); doubling", n, exc.residual)
                n *= 2

    def __repr__(self) -> str:
        return f"CircleDiffeo(bandlimit={self.bandlimit})"


def compose(
    f: CircleField, g: CircleDiffeo, config: Optional[ToolkitConfig] = None
) -> CircleField:
    """f ∘ g resampled on an oversampled grid.

    Raises:
        TruncationError: when the composite needs more modes than available
    """
    cfg = config or default_config()
    if g.bandlimit == 0:
        # rigid rotation: exact phase shift
        a = g.displacement.integral_mean()
        k = f.wavenumbers()
        return CircleField(f.modes * np.exp(1j * k * a), f.truncation_residual)
    n = max(cfg.bandlimit, f.bandlimit, g.bandlimit)
    return resample(lambda th: f.evaluate(g(th)), n, cfg, "composition")


def diffeo_flow(
    xi: CircleField,
    t: float,
    config: Optional[ToolkitConfig] = None,
    require_diff0: bool = False,
) -> CircleDiffeo:
    """Time-t flow of the vector field ξ(θ) d/dθ.

    Integrates dθ/ds = ξ(θ) for every grid point simultaneously (one shared
    step sequence, so the error is smooth in θ) and fits the displacement.

    Args:
        xi: Generating vector field
        t: Flow time
        config: Tolerances and resolution
        require_diff0: Check ξ(0) = ξ'(0) = ξ''(0) = 0 first

    Raises:
        JetConditionError: ``require_diff0`` set and the jet of ξ at 0 is nonzero
        OrientationError: the resulting map has f' <= 0
    """
    cfg = config or default_config()
    if require_diff0:
        defects = [abs(xi.derivative(n).evaluate(0.0)) for n in range(3)]
        if max(defects) > cfg.jet_tol:
            raise JetConditionError(
                f"generator violates Diff0 jet conditions at 0: {defects}"
            )
    n = max(cfg.bandlimit, xi.bandlimit)
    n_points = cfg.oversampling * (2 * n + 1)
    theta0 = grid(n_points)
    if t == 0 or xi.max_abs() == 0.0:
        return CircleDiffeo.identity()
    sol = solve_ivp(
        lambda _s, y: xi.evaluate(y),
        (0.0, t),
        theta0,
        method=cfg.ode_method,
        rtol=cfg.ode_rtol * 1e-2,
        atol=cfg.ode_atol * 1e-2,
    )
    if not sol.success:
        raise IntegrationError(f"flow integration failed: {sol.message}")
    logger.debug("diffeo_flow: %d RHS evaluations for t=%g", sol.nfev, t)
    h = field_from_samples(sol.y[:, -1] - theta0, n)
    return CircleDiffeo(h, check=True, config=cfg)


# ----------------------------------------------------------------------
# random inputs for property sweeps
# ----------------------------------------------------------------------
def random_field(
    rng: np.random.Generator,
    bandlimit: int = 4,
    amplitude: float = 1.0,
    mean: Optional[float] = None,
) -> CircleField:
    """Random real field with 1/k^2 spectral decay."""
    k = np.arange(bandlimit + 1, dtype=float)
    scale = amplitude / np.maximum(k, 1.0) ** 2
    modes = scale * (rng.normal(size=bandlimit + 1) + 1j * rng.normal(size=bandlimit + 1))
    modes[0] = rng.normal() * amplitude if mean is None else mean
    return CircleField(modes)


def random_diffeo(
    rng: np.random.Generator,
    bandlimit: int = 3,
    max_slope: float = 0.4,
) -> CircleDiffeo:
    """Random diffeo whose displacement slope is bounded by ``max_slope``."""
    h = random_field(rng, bandlimit, 1.0)
    slope_bound = 2.0 * float(np.sum(np.arange(h.bandlimit + 1) * np.abs(h.modes)))
    if slope_bound > 0:
        h = h * (max_slope / slope_bound)
    return CircleDiffeo(h)
