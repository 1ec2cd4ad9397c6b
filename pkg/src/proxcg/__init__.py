"""Proximal nonlinear conjugate gradient solvers for ``min g(x) + h(x)``.

``g`` is smooth (least squares, logistic, Student's t) and ``h`` has a cheap
proximal map (``l1``, MCP). The main entry point is :func:`solve`.
"""

from .nonsmooth import L1, MCP, ProxDomainError, Zero
from .problem import CompositeProblem, OracleError
from .smooth import LeastSquares, Logistic, StudentT
from .solver import VARIANTS, SolveReport, SolverConfig, solve, solve_apg, solve_pgm

__all__ = [
    "CompositeProblem", "OracleError", "LeastSquares", "Logistic", "StudentT",
    "L1", "MCP", "Zero", "ProxDomainError", "SolverConfig", "SolveReport",
    "VARIANTS", "solve", "solve_pgm", "solve_apg",
]

__version__ = "0.1.0"
