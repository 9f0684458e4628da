"""trskit: trust-region subproblem solving via convex reformulation.

Minimize y'Qy + 2g'y over the unit ball, optionally with linear side
constraints Ay >= b and hollow (excluded-region) variants.  The pipeline
estimates the minimum eigenvalue of Q, shifts the objective into a convex
surrogate that agrees with the original on the unit sphere, minimizes the
surrogate with accelerated projected gradient, and certifies or recovers
tightness through structural-condition witnesses and boundary pushes.
"""

from .conditions import (
    ConditionReport,
    check_condition_convexify,
    check_condition_dimensionality,
    check_condition_relaxation,
    check_hollow_containment,
    verify_witness,
)
from .core import (
    Ellipsoid,
    HollowSpec,
    LinearConstraintBlock,
    SymSparseMatrix,
    TrsInstance,
    TrsSolution,
    parse_instance,
    serialize_instance,
    validate,
)
from .eigen import EigenEstimate, min_eigenvalue, spectral_norm_estimate
from .errors import TrskitError
from .hull import (
    EpigraphPoint,
    build_Wt,
    compute_s,
    extreme_point_filter,
    hull_witness,
    in_Fs,
    in_conv_X,
    verify_spectrum_path,
)
from .oracle import KktCertificate, grid_minimize, secular_solve
from .reformulate import ReformulatedObjective, build as build_reformulation
from .solver import SolveSettings, boundary_push, solve

__version__ = "0.1.0"

__all__ = [
    "ConditionReport",
    "EigenEstimate",
    "Ellipsoid",
    "EpigraphPoint",
    "HollowSpec",
    "KktCertificate",
    "LinearConstraintBlock",
    "ReformulatedObjective",
    "SolveSettings",
    "SymSparseMatrix",
    "TrsInstance",
    "TrsSolution",
    "TrskitError",
    "boundary_push",
    "build_Wt",
    "build_reformulation",
    "check_condition_convexify",
    "check_condition_dimensionality",
    "check_condition_relaxation",
    "check_hollow_containment",
    "compute_s",
    "extreme_point_filter",
    "grid_minimize",
    "hull_witness",
    "in_Fs",
    "in_conv_X",
    "min_eigenvalue",
    "parse_instance",
    "secular_solve",
    "serialize_instance",
    "solve",
    "spectral_norm_estimate",
    "validate",
    "verify_spectrum_path",
    "verify_witness",
    "__version__",
]
