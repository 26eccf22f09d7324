"""Conservative SBP discretizations of nonlinear dispersive wave equations."""

from . import bundles, elliptic, equations, golden, harness, sbp, solitary, timeint

__all__ = [
    "sbp",
    "elliptic",
    "equations",
    "bundles",
    "timeint",
    "solitary",
    "harness",
    "golden",
]
__version__ = "0.1.0"
