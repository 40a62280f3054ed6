"""Coadj Utils - Virasoro coadjoint orbits, diff-Wilson loops and Dirac constraint analysis.

This package provides tools to:
- Represent band-limited fields and diffeomorphisms of the circle
- Apply Virasoro and Kac-Moody adjoint and coadjoint actions
- Evaluate the Schwarzian derivative and check its identities
- Compute monodromy matrices of the Hill and third-order covariant operators
- Manipulate differential polynomials and run Dirac's constraint algorithm
- Build the transverse diff-field theories in flat two dimensions
- Integrate the reduced (Q, P) dynamics and the KdV flow
- Decode field records and encode reports to .json, .csv or .parquet
"""

__version__ = "0.3.0"

from .config import ToolkitConfig, default_config, load_config
from .errors import CoadjError
from .circlefield import CircleDiffeo, CircleField, field_from_samples
from .valgebra import KMField, VirAdjoint, VirCoadjoint, km_coadjoint, vir_coadjoint
from .schwarzian import IntervalMap, schwarzian
from .wilson import Monodromy, classify_orbit, monodromy_hill, monodromy_nabla3
from .diffpoly import DiffPoly, euler_variation, normal_form, parse
from .dirac import CASES, CanonicalPairSet, ConstraintChainReport, consistency_chain
from .transverse import build_lagrangian, build_momentum_flat, field_equations
from .dynamics import (
    PhasePoint,
    ReducedSystem,
    integrate_reduced,
    kdv_evolve,
    verify_closed_form,
)
from .field_decoder import FieldDecoder
from .report_encoder import ReportEncoder
from .checks import CheckResult, run_checks

__all__ = [
    "ToolkitConfig",  # Tolerances, bandlimit and seed
    "default_config",
    "load_config",
    "CoadjError",
    "CircleField",  # Primary field interface
    "CircleDiffeo",
    "field_from_samples",
    "VirAdjoint",
    "VirCoadjoint",
    "KMField",
    "vir_coadjoint",
    "km_coadjoint",
    "IntervalMap",
    "schwarzian",
    "Monodromy",
    "monodromy_hill",
    "monodromy_nabla3",
    "classify_orbit",
    "DiffPoly",  # Symbolic layer
    "parse",
    "normal_form",
    "euler_variation",
    "CanonicalPairSet",
    "ConstraintChainReport",
    "consistency_chain",
    "CASES",
    "build_momentum_flat",
    "build_lagrangian",
    "field_equations",
    "PhasePoint",  # Dynamics
    "ReducedSystem",
    "integrate_reduced",
    "kdv_evolve",
    "verify_closed_form",
    "FieldDecoder",  # File I/O
    "ReportEncoder",
    "CheckResult",
    "run_checks",
]
