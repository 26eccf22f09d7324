from .types import (
    Grid,
    MassMatrix,
    SbpConstructionError,
    SbpOperator1,
    SbpOperator2,
    SbpOperator4,
    UpwindPair,
    dump_matrix_csv,
)
from .fd import fd_periodic_d1, fd_periodic_d2, fd_periodic_upwind, fourier_d1
from .lobatto import (
    LobattoElement,
    legendre_gauss_lobatto,
    lobatto_diff_matrix,
    lobatto_element,
    lobatto_upwind_matrices,
    mapped_element,
    uniform_mesh,
)
from .coupling import couple_cg, couple_cg_d2, couple_cg_upwind, couple_dg, couple_dg_upwind
from .verify import VerificationReport, compatibility_gap, verify_sbp

__all__ = [
    "Grid",
    "MassMatrix",
    "SbpConstructionError",
    "SbpOperator1",
    "SbpOperator2",
    "SbpOperator4",
    "UpwindPair",
    "dump_matrix_csv",
    "fd_periodic_d1",
    "fd_periodic_d2",
    "fd_periodic_upwind",
    "fourier_d1",
    "LobattoElement",
    "legendre_gauss_lobatto",
    "lobatto_diff_matrix",
    "lobatto_element",
    "lobatto_upwind_matrices",
    "mapped_element",
    "uniform_mesh",
    "couple_cg",
    "couple_cg_d2",
    "couple_cg_upwind",
    "couple_dg",
    "couple_dg_upwind",
    "VerificationReport",
    "compatibility_gap",
    "verify_sbp",
]
