"""twoway - 부호가 바뀌는 가중치를 가진 확산 방정식의 반구간 경계값 문제 풀이기."""

from .models import (
    BoundaryCondition,
    BoundaryData,
    BoundaryKind,
    Coefficient,
    DirectMethod,
    Framework,
    LMode,
    ProblemSpec,
    TabulatedFunction,
    Weight,
    WeightKind,
)
from .norms import p_norm_analytic_periodic, powerlaw_fit, wln_norm, wln_norm_sweep
from .operators import build_operators, expand
from .problems import ProblemFactory
from .quad import build_grid
from .solver import direct_solve, evaluate, flux, neumann_solve
from .spectral import solve_spectrum
from .version import __version__

__all__ = [
    "__version__",
    "BoundaryCondition",
    "BoundaryData",
    "BoundaryKind",
    "Coefficient",
    "DirectMethod",
    "Framework",
    "LMode",
    "ProblemSpec",
    "TabulatedFunction",
    "Weight",
    "WeightKind",
    "ProblemFactory",
    "build_grid",
    "solve_spectrum",
    "build_operators",
    "expand",
    "neumann_solve",
    "direct_solve",
    "evaluate",
    "flux",
    "wln_norm",
    "wln_norm_sweep",
    "powerlaw_fit",
    "p_norm_analytic_periodic",
]
