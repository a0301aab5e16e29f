"""Two classical comparison solvers, after Benamou, Froese and Oberman.

M2 is a Poisson fixed point: repeatedly solve lap(u_k) = g_k with the
Dirichlet data held fixed, updating

    g_{k+1} = sqrt((lap u_k)^2 + 2 (f - det D^2 u_k)),   g_0 = 2 sqrt(f).

A fixed point satisfies det D^2 u = f.  For the discrete operators used
here (the five-point Laplacian equals the trace of the discrete Hessian)
the radicand is bounded below by (lap u)^2 / 2 + 2f, so it can only go
negative through roundoff or a negative f; it is clamped at zero by
default and raises when clamping is disabled.

M1 rewrites the discretized determinant equation at each node as a
quadratic in u_ij.  With the neighbor averages

    a1 = (u_{i+1,j} + u_{i-1,j})/2        a2 = (u_{i,j+1} + u_{i,j-1})/2
    a3 = (u_{i+1,j+1} + u_{i-1,j-1})/2    a4 = (u_{i-1,j+1} + u_{i+1,j-1})/2

the quadratic 4(a1 - u)(a2 - u) - (a3 - a4)^2/4 = h^4 f has the roots
(a1 + a2 -/+ s)/2 with s = sqrt((a1-a2)^2 + (a3-a4)^2/4 + h^4 f).  Taking
the smaller root keeps both axial second differences nonnegative (local
convexity); the larger root is kept available behind ``root_selection``
for fidelity experiments.  The equation is swept in Gauss-Seidel fashion,
boundary values fixed, x-index fastest, updated values used immediately;
one iteration means one full sweep.  Gauss-Seidel over the full grid is
inherently sequential, so the sweep runs as a compiled numba kernel.

Both methods start from the same Poisson warm start as the Bellman
iteration, which keeps the three solvers directly comparable.  M2 counts
the warm start as iteration 1 (it is a linear solve); M1 counts sweeps
only.
"""

from __future__ import annotations

import dataclasses
import math
import time

import numba
import numpy as np

from . import linsolve
from .bellman_core import identity_bellman_field, positive_definite_mask
from .bellman_solver import SolveReport, _problem_arrays, _solve_trace
from .errors import GridMismatchError, NegativeRadicandError
from .fdops import LinearSystem, assemble_trace_system, hessian, unflatten_interior
from .grid import GridSpec, ScalarField, field_from_interior, sample_interior
from .problems import ProblemSpec

M1_ROOT_CHOICES = ("smaller", "as_printed")


@dataclasses.dataclass(frozen=True)
class M1Config:
    """Gauss-Seidel termination and root-selection parameters."""

    tolerance: float = 1e-12
    max_iterations: int = 300_000
    root_selection: str = "smaller"

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.root_selection not in M1_ROOT_CHOICES:
            raise ValueError(
                f"root_selection must be one of {M1_ROOT_CHOICES}, "
                f"got {self.root_selection!r}"
            )


@dataclasses.dataclass(frozen=True)
class M2Config:
    """Poisson fixed-point termination and clamping parameters."""

    tolerance: float = 1e-12
    max_iterations: int = 10_000
    radicand_clamp: bool = True

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


def _radicand(lap: np.ndarray, det: np.ndarray, f_int: np.ndarray) -> np.ndarray:
    return lap * lap + 2.0 * (f_int - det)


def m2_update_rhs(u: ScalarField, f: ScalarField, clamp: bool = True) -> ScalarField:
    """One application of the right-hand-side update map.

    ``f`` is read at interior nodes only; the returned field carries the
    updated g on the interior and zeros on the boundary.  With
    ``clamp=False`` a negative radicand raises
    :class:`NegativeRadicandError` instead of being truncated.
    """
    if u.grid != f.grid:
        raise GridMismatchError("iterate and right-hand side grids differ")
    h = hessian(u)
    r = _radicand(h.hxx + h.hyy, h.determinant(), f.interior)
    if clamp:
        r = np.maximum(r, 0.0)
    elif (r < 0).any():
        raise NegativeRadicandError(
            f"radicand reached {r.min():.3e} with clamping disabled"
        )
    return field_from_interior(u.grid, np.sqrt(r))


def m2_solve(
    problem: ProblemSpec, grid: GridSpec, config: M2Config = M2Config()
) -> SolveReport:
    """Run the Poisson fixed point on a problem and grid.

    The Laplacian coefficients and the boundary contribution to the
    right-hand side are assembled once; every iteration still factors the
    system afresh so that per-iteration cost matches the other solvers.
    Marked counts record, per iterate, how many interior Hessians fail the
    plain (zero-floor) positive definiteness test.
    """
    rhs0, phi = _problem_arrays(problem, grid)
    f_int = sample_interior(grid, problem.rhs)
    start = time.perf_counter()
    # Assemble the Laplacian with a zero interior load: base.rhs then holds
    # exactly the boundary contribution, to which each iterate's g is added.
    zero = field_from_interior(grid, np.zeros_like(f_int))
    base = assemble_trace_system(identity_bellman_field(grid), zero, phi)
    g = rhs0.interior.copy()
    u = ScalarField(grid, np.zeros((grid.n, grid.n)))
    update_norms: list[float] = []
    marked_counts: list[int] = []
    iterations = 0
    converged = False
    while iterations < config.max_iterations:
        system = LinearSystem(base.dimension, base.rows, base.cols, base.values,
                              base.rhs + g.ravel(order="F"))
        x = linsolve.solve(system)
        u_next = field_from_interior(grid, unflatten_interior(x, grid), boundary=phi)
        delta = float(np.abs(u_next.values - u.values).max())
        u = u_next
        iterations += 1
        h = hessian(u)
        det = h.determinant()
        pd = positive_definite_mask(h.hxx, h.hxy, h.hyy, 0.0)
        update_norms.append(delta)
        marked_counts.append(int((~pd).sum()))
        if delta < config.tolerance:
            converged = True
            break
        r = _radicand(h.hxx + h.hyy, det, f_int)
        if config.radicand_clamp:
            r = np.maximum(r, 0.0)
        elif (r < 0).any():
            raise NegativeRadicandError(
                f"radicand reached {r.min():.3e} with clamping disabled"
            )
        g = np.sqrt(r)
    wall = time.perf_counter() - start
    return SolveReport(converged, iterations, u, update_norms, marked_counts, wall)


def m1_update(
    a1: float, a2: float, a3: float, a4: float, h: float, f_val: float,
    root: str = "smaller",
) -> float:
    """Solve the nodal quadratic for u_ij given its eight neighbors.

    ``root="smaller"`` returns (a1 + a2 - s)/2, which never exceeds
    min(a1, a2); ``root="as_printed"`` returns the larger root
    (a1 + a2 + s)/2.
    """
    if root not in M1_ROOT_CHOICES:
        raise ValueError(f"root must be one of {M1_ROOT_CHOICES}, got {root!r}")
    s = math.sqrt((a1 - a2) ** 2 + 0.25 * (a3 - a4) ** 2 + h**4 * f_val)
    sign = -1.0 if root == "smaller" else 1.0
    return 0.5 * (a1 + a2 + sign * s)


@numba.njit(cache=True)
def _m1_sweep(v: np.ndarray, f_int: np.ndarray, h4: float, sign: float) -> float:
    """One in-place Gauss-Seidel sweep; returns the sup-norm change."""
    n = v.shape[0]
    max_change = 0.0
    for j in range(1, n - 1):
        for i in range(1, n - 1):
            a1 = 0.5 * (v[i + 1, j] + v[i - 1, j])
            a2 = 0.5 * (v[i, j + 1] + v[i, j - 1])
            a3 = 0.5 * (v[i + 1, j + 1] + v[i - 1, j - 1])
            a4 = 0.5 * (v[i - 1, j + 1] + v[i + 1, j - 1])
            s = np.sqrt((a1 - a2) ** 2 + 0.25 * (a3 - a4) ** 2 + h4 * f_int[i - 1, j - 1])
            new = 0.5 * (a1 + a2 + sign * s)
            change = abs(new - v[i, j])
            if change > max_change:
                max_change = change
            v[i, j] = new
    return max_change


@numba.njit(cache=True)
def _count_nonconvex(v: np.ndarray, hx2: float, hy2: float, hxhy4: float) -> int:
    """Interior nodes whose discrete Hessian fails a11 > 0 and det > 0."""
    n = v.shape[0]
    count = 0
    for j in range(1, n - 1):
        for i in range(1, n - 1):
            hxx = (v[i + 1, j] - 2.0 * v[i, j] + v[i - 1, j]) / hx2
            hyy = (v[i, j + 1] - 2.0 * v[i, j] + v[i, j - 1]) / hy2
            hxy = (v[i + 1, j + 1] - v[i + 1, j - 1] - v[i - 1, j + 1] + v[i - 1, j - 1]) / hxhy4
            if not (hxx > 0.0 and hxx * hyy - hxy * hxy > 0.0):
                count += 1
    return count


_KERNELS_READY = False


def _warm_kernels() -> None:
    # Compile outside any timed region so wall times measure sweeps only.
    global _KERNELS_READY
    if _KERNELS_READY:
        return
    dummy_v = np.zeros((3, 3))
    dummy_f = np.zeros((1, 1))
    _m1_sweep(dummy_v, dummy_f, 1.0, -1.0)
    _count_nonconvex(dummy_v, 1.0, 1.0, 4.0)
    _KERNELS_READY = True


def m1_solve(
    problem: ProblemSpec, grid: GridSpec, config: M1Config = M1Config()
) -> SolveReport:
    """Run the Gauss-Seidel iteration on a problem and grid.

    Requires square spacing (the nodal quadratic is written for a single
    h).  Starts from the Poisson warm start; iterations count full sweeps.
    """
    if not math.isclose(grid.h_x, grid.h_y, rel_tol=1e-12):
        raise ValueError("the Gauss-Seidel scheme requires h_x == h_y")
    _warm_kernels()
    rhs0, phi = _problem_arrays(problem, grid)
    f_int = np.ascontiguousarray(sample_interior(grid, problem.rhs))
    start = time.perf_counter()
    v = _solve_trace(identity_bellman_field(grid), rhs0, phi).values.copy()

    h4 = grid.h_x**4
    hx2, hy2 = grid.h_x**2, grid.h_y**2
    hxhy4 = 4.0 * grid.h_x * grid.h_y
    sign = -1.0 if config.root_selection == "smaller" else 1.0
    update_norms: list[float] = []
    marked_counts: list[int] = []
    iterations = 0
    converged = False
    while iterations < config.max_iterations:
        change = float(_m1_sweep(v, f_int, h4, sign))
        iterations += 1
        update_norms.append(change)
        marked_counts.append(int(_count_nonconvex(v, hx2, hy2, hxhy4)))
        if change < config.tolerance:
            converged = True
            break
    wall = time.perf_counter() - start
    final = ScalarField(grid, v)
    return SolveReport(converged, iterations, final, update_norms, marked_counts, wall)
