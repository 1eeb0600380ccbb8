"""Dense primal-dual interior-point solver for linear conic programs."""

from .ipm import SolverOptions, SolverResult, Status, residuals, solve
from .program import (
    FREE,
    NONNEG,
    PSD,
    Block,
    Cone,
    ConicProgram,
    ProgramBuilder,
    smat,
    svec,
)

__all__ = [
    "FREE", "NONNEG", "PSD", "Block", "Cone", "ConicProgram", "ProgramBuilder",
    "SolverOptions", "SolverResult", "Status", "residuals", "smat", "solve", "svec",
]
