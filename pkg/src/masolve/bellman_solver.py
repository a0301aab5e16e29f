"""Fixed-point solver for det(D^2 u) = f via linearized trace equations.

Each iterate solves the linear elliptic Dirichlet problem

    tr(B_k(x) D^2 u_k(x)) = 2 sqrt(f(x)),   u_k = phi on the boundary,

where B_k is built pointwise from the discrete Hessian of the previous
iterate: the trace-minimizing determinant-1 matrix where that Hessian is
positive definite, and a repaired (neighbor-averaged) matrix elsewhere.
The first iterate uses B_0 = I, i.e. a Poisson warm start with right-hand
side 2 sqrt(f).  At a fixed point with everywhere positive definite
Hessian, tr(B D^2 u) = 2 sqrt(det D^2 u), so the iterate solves the
discretized determinant equation itself.

Iterations are counted as linear solves: the Poisson warm start is
iteration 1, and its recorded update norm is the sup norm of the start
itself (the change from the zero field).  The run stops once the sup-norm
change between consecutive iterates drops below the configured tolerance,
or at the iteration cap (reported as non-convergence, never raised).
"""

from __future__ import annotations

import dataclasses
import time

import numpy as np

from . import linsolve
from .bellman_core import (
    BellmanField,
    bellman_field_from_hessian,
    identity_bellman_field,
    interpolate_marked,
)
from .errors import NegativeRhsError
from .fdops import assemble_trace_system, hessian, unflatten_interior
from .grid import GridSpec, ScalarField, field_from_interior, sample, sample_interior
from .problems import ProblemSpec


@dataclasses.dataclass(frozen=True)
class SolverConfig:
    """Termination and marking parameters for the Bellman iteration."""

    tolerance: float = 1e-12
    max_iterations: int = 10_000
    det_floor: float = 1e-10
    interpolation_enabled: bool = True

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.det_floor < 0:
            raise ValueError("det_floor must be nonnegative")


@dataclasses.dataclass
class SolveReport:
    """Outcome of an iterative solve.

    ``update_norms[k]`` is the sup-norm change produced by iteration k+1
    and ``marked_counts[k]`` the number of interior nodes whose Hessian
    failed the positive definiteness test when that iteration built its
    coefficients (0 for iterations that use a fixed operator).  Both lists
    have exactly ``iterations`` entries, and ``converged`` implies the last
    update norm is below the tolerance in force.
    """

    converged: bool
    iterations: int
    final: ScalarField
    update_norms: list[float]
    marked_counts: list[int]
    wall_time_seconds: float


def _problem_arrays(problem: ProblemSpec, grid: GridSpec) -> tuple[ScalarField, ScalarField]:
    """Sample 2*sqrt(f) on the interior and phi on the full grid.

    f is never evaluated at boundary nodes (it may be singular there); the
    returned right-hand-side field carries zeros on the boundary.
    """
    f_int = sample_interior(grid, problem.rhs)
    if (f_int < 0).any():
        raise NegativeRhsError(
            f"problem '{problem.name}' has negative f at an interior node"
        )
    rhs = field_from_interior(grid, 2.0 * np.sqrt(f_int))
    phi = sample(grid, problem.boundary)
    return rhs, phi


def _solve_trace(b: BellmanField, rhs: ScalarField, phi: ScalarField) -> ScalarField:
    system = assemble_trace_system(b, rhs, phi)
    x = linsolve.solve(system)
    return field_from_interior(b.grid, unflatten_interior(x, b.grid), boundary=phi)


def _step(
    u_prev: ScalarField, rhs: ScalarField, phi: ScalarField, config: SolverConfig
) -> tuple[ScalarField, int]:
    b = bellman_field_from_hessian(hessian(u_prev), config.det_floor)
    marked_count = b.marked_count
    if config.interpolation_enabled:
        b = interpolate_marked(b)
    return _solve_trace(b, rhs, phi), marked_count


def poisson_start(problem: ProblemSpec, grid: GridSpec) -> ScalarField:
    """Warm start: solve the Poisson problem lap(u) = 2 sqrt(f), u = phi."""
    rhs, phi = _problem_arrays(problem, grid)
    return _solve_trace(identity_bellman_field(grid), rhs, phi)


def bellman_step(
    u_prev: ScalarField, problem: ProblemSpec, config: SolverConfig = SolverConfig()
) -> tuple[ScalarField, int]:
    """One linearize-and-solve step from the given iterate.

    Returns the new iterate and the number of marked nodes (counted before
    the interpolation repair).  The new iterate carries phi on the boundary
    bit-exactly.
    """
    rhs, phi = _problem_arrays(problem, u_prev.grid)
    return _step(u_prev, rhs, phi, config)


def bellman_solve(
    problem: ProblemSpec, grid: GridSpec, config: SolverConfig = SolverConfig()
) -> SolveReport:
    """Run the full iteration on a problem and grid.

    Deterministic: identical inputs give identical reports apart from the
    wall time.  Non-convergence at the iteration cap is reported via
    ``converged=False``.  Note that a run on a fully degenerate problem
    (f identically 0) stagnates at the warm start with every node marked;
    the marked counts let callers flag that the result is merely the
    Poisson solution.
    """
    rhs, phi = _problem_arrays(problem, grid)
    start = time.perf_counter()
    u = _solve_trace(identity_bellman_field(grid), rhs, phi)
    update_norms = [float(np.abs(u.values).max())]
    marked_counts = [0]
    iterations = 1
    converged = update_norms[0] < config.tolerance
    while not converged and iterations < config.max_iterations:
        u_next, marked = _step(u, rhs, phi, config)
        iterations += 1
        delta = float(np.abs(u_next.values - u.values).max())
        update_norms.append(delta)
        marked_counts.append(marked)
        u = u_next
        converged = delta < config.tolerance
    wall = time.perf_counter() - start
    return SolveReport(converged, iterations, u, update_norms, marked_counts, wall)
