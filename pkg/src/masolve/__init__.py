"""Solvers for the Dirichlet problem of the 2-D Monge-Ampere equation.

Three methods share one narrow-stencil second-order discretization:

- ``bellman``: fixed-point iteration on linearized trace equations whose
  coefficient matrices attain the infimum in the arithmetic-geometric mean
  identity for the determinant (:mod:`masolve.bellman_solver`);
- ``m2``: a Poisson fixed point with an updated right-hand side;
- ``m1``: pointwise Gauss-Seidel on the discretized quadratic
  (:mod:`masolve.reference_methods`).

:mod:`masolve.problems` catalogs the benchmark problems and
:mod:`masolve.harness` runs convergence studies over them (also available
as the ``masolve`` command line tool).
"""

from .bellman_core import (
    BellmanField,
    SymMatrix2,
    bellman_lower_bound_check,
    bellman_matrix,
    interpolate_marked,
    is_positive_definite,
)
from .bellman_solver import SolveReport, SolverConfig, bellman_solve, bellman_step, poisson_start
from .errors import MASolveError
from .fdops import HessianField, LinearSystem, assemble_trace_system, hessian, laplacian, ma_determinant
from .grid import GridSpec, ScalarField, build_grid, is_boundary, sample, sample_interior
from .harness import StudyConfig, StudyRecord, fit_report, run_solve, run_study
from .linsolve import residual, solve
from .metrics import ErrorSummary, convexity_diagnostics, error_summary, monotonicity_margin, order_fit
from .problems import PROBLEM_NAMES, ProblemSpec, catalog, verify_consistency
from .reference_methods import M1Config, M2Config, m1_solve, m1_update, m2_solve, m2_update_rhs

__version__ = "0.1.0"

__all__ = [
    "BellmanField",
    "ErrorSummary",
    "GridSpec",
    "HessianField",
    "LinearSystem",
    "M1Config",
    "M2Config",
    "MASolveError",
    "PROBLEM_NAMES",
    "ProblemSpec",
    "ScalarField",
    "SolveReport",
    "SolverConfig",
    "StudyConfig",
    "StudyRecord",
    "SymMatrix2",
    "assemble_trace_system",
    "bellman_lower_bound_check",
    "bellman_matrix",
    "bellman_solve",
    "bellman_step",
    "build_grid",
    "catalog",
    "convexity_diagnostics",
    "error_summary",
    "fit_report",
    "hessian",
    "interpolate_marked",
    "is_boundary",
    "is_positive_definite",
    "laplacian",
    "m1_solve",
    "m1_update",
    "m2_solve",
    "m2_update_rhs",
    "ma_determinant",
    "monotonicity_margin",
    "order_fit",
    "poisson_start",
    "residual",
    "run_solve",
    "run_study",
    "sample",
    "sample_interior",
    "solve",
    "verify_consistency",
    "__version__",
]
