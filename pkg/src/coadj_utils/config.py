"""Toolkit-wide numerical settings.

Defaults mirror the tolerances used throughout the package; every CLI run
records the resolved configuration in its output header.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass, fields, replace as dc_replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

from .errors import ConfigurationError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

LOG_ENV_VAR = "COADJ_LOG"


@dataclass(frozen=True)
class ToolkitConfig:
    """Immutable bundle of tolerances, resolutions and caps."""

    # circle fields
    bandlimit: int = 64
    oversampling: int = 4
    truncation_tol: float = 1e-10
    jet_tol: float = 1e-9
    min_derivative: float = 1e-8
    # ODE integration
    ode_rtol: float = 1e-10
    ode_atol: float = 1e-12
    ode_method: str = "DOP853"
    # symbolic engine
    max_jet_order: int = 8
    weak_coefficient_order: int = 4
    weak_derivative_order: int = 3
    weak_rounds: int = 3
    chain_iterations: int = 8
    # reduced dynamics
    exclusion_radius: float = 1e-3
    quad_epsabs: float = 1e-12
    quad_epsrel: float = 1e-10
    e0_base_point: float = 1.5
    # KdV
    kdv_dealias: float = 2.0 / 3.0
    kdv_energy_cap: float = 1e6
    # algebra
    linear_center: bool = False
    # property sweeps
    seed: int = 0

    def __post_init__(self) -> None:
        if self.bandlimit < 1:
            raise ConfigurationError(f"bandlimit must be positive, got {self.bandlimit}")
        if self.oversampling < 2:
            raise ConfigurationError(
                f"oversampling must be at least 2, got {self.oversampling}"
            )
        for name in ("truncation_tol", "jet_tol", "min_derivative", "ode_rtol",
                     "ode_atol", "exclusion_radius", "quad_epsabs", "quad_epsrel"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0 < self.kdv_dealias <= 1:
            raise ConfigurationError(f"kdv_dealias must lie in (0, 1], got {self.kdv_dealias}")
        if self.max_jet_order < 3:
            raise ConfigurationError(
                f"max_jet_order must be at least 3, got {self.max_jet_order}"
            )
        if abs(self.e0_base_point - 1.0) <= self.exclusion_radius or self.e0_base_point <= 0:
            raise ConfigurationError(
                f"e0_base_point {self.e0_base_point} sits on the Q=1 or Q=0 singularity"
            )

    def replace(self, **overrides: Any) -> "ToolkitConfig":
        """Return a copy with the given fields replaced (validated)."""
        unknown = set(overrides) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigurationError(f"Unknown configuration keys: {sorted(unknown)}")
        return dc_replace(self, **overrides)

    def to_dict(self) -> Dict[str, Any]:
        """Plain dict of all settings."""
        return asdict(self)


_DEFAULT = ToolkitConfig()


def default_config() -> ToolkitConfig:
    """Module-level default configuration."""
    return _DEFAULT


def load_config(path: Optional[PathLike] = None, **overrides: Any) -> ToolkitConfig:
    """Build a configuration from an optional JSON file plus keyword overrides.

    Args:
        path: JSON file holding a flat object of overrides
        **overrides: Values taking precedence over the file

    Returns:
        Validated ToolkitConfig
    """
    values: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"Config file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                values = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"Config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(values, dict):
            raise ConfigurationError(f"Config file {path} must hold a JSON object")
        logger.debug("loaded %d config overrides from %s", len(values), path)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return _DEFAULT.replace(**values)


def log_level_from_env(default: int = logging.WARNING) -> int:
    """Logging level named by the COADJ_LOG environment variable."""
    raw = os.environ.get(LOG_ENV_VAR)
    if not raw:
        return default
    raw = raw.strip()
    if raw.isdigit():
        return int(raw)
    level = logging.getLevelName(raw.upper())
    if not isinstance(level, int):
        raise ConfigurationError(f"{LOG_ENV_VAR}={raw!r} is not a logging level")
    return level
