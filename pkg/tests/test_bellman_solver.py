import numpy as np
import pytest

from masolve.bellman_solver import SolverConfig, bellman_solve, bellman_step, poisson_start
from masolve.errors import NegativeRhsError
from masolve.grid import build_grid, sample
from masolve.metrics import convexity_diagnostics
from masolve.problems import ProblemSpec, catalog


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(tolerance=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iterations=0)
    with pytest.raises(ValueError):
        SolverConfig(det_floor=-1e-3)


def test_poisson_start_harmonic_linear():
    spec = ProblemSpec("lin", -1, 1, -1, 1, lambda x, y: 0 * x, lambda x, y: x)
    grid = build_grid(*spec.domain, 7)
    u0 = poisson_start(spec, grid)
    X, _ = grid.mesh()
    assert np.abs(u0.values - X).max() < 1e-12


def test_poisson_start_quadratic():
    # f = 4 makes 2*sqrt(f) = 4 = lap(x^2 + y^2); the stencil is exact.
    spec = ProblemSpec(
        "quad", -1, 1, -1, 1, lambda x, y: 4.0 + 0 * x, lambda x, y: x * x + y * y
    )
    grid = build_grid(*spec.domain, 9)
    u0 = poisson_start(spec, grid)
    X, Y = grid.mesh()
    assert np.abs(u0.values - (X * X + Y * Y)).max() < 1e-10


def test_poisson_start_standard_example_is_strictly_convex():
    spec = catalog("standard")
    grid = build_grid(*spec.domain, 63)
    failures, _ = convexity_diagnostics(poisson_start(spec, grid), det_floor=1e-10)
    assert failures == 0


def test_poisson_start_rejects_negative_f():
    spec = ProblemSpec("bad", -1, 1, -1, 1, lambda x, y: -1.0 + 0 * x, lambda x, y: 0 * x)
    with pytest.raises(NegativeRhsError):
        poisson_start(spec, build_grid(*spec.domain, 7))


@pytest.mark.parametrize("name,params", [
    ("standard", {}),
    ("reg_degenerate", {"epsilon": 0.1}),
    ("trigonometric", {}),
])
def test_bellman_step_near_fixed_point_on_sampled_exact(name, params):
    # smooth, strictly convex entries: one step from the sampled exact
    # solution moves at most O(h^2)
    spec = catalog(name, **params)
    grid = build_grid(*spec.domain, 63)
    u_exact = sample(grid, spec.exact)
    u_next, _ = bellman_step(u_exact, spec)
    assert np.abs(u_next.values - u_exact.values).max() <= 10 * grid.h_x**2


def test_bellman_step_concave_iterate_falls_back_to_poisson():
    spec = catalog("standard")
    grid = build_grid(*spec.domain, 21)
    concave = sample(grid, lambda x, y: -x * x - y * y)
    u_next, marked = bellman_step(concave, spec)
    assert marked == grid.num_interior ** 2
    # all-identity repaired coefficients reproduce the warm start bit-exactly
    assert (u_next.values == poisson_start(spec, grid).values).all()


def test_bellman_step_marks_on_regularized_degenerate_start():
    spec = catalog("reg_degenerate", epsilon=0.1)
    grid = build_grid(*spec.domain, 63)
    u0 = poisson_start(spec, grid)
    _, marked = bellman_step(u0, spec)
    assert marked > 0


def test_bellman_solve_standard_small():
    spec = catalog("standard")
    grid = build_grid(*spec.domain, 31)
    report = bellman_solve(spec, grid)
    assert report.converged
    assert report.iterations <= 15
    assert report.marked_counts == [0] * report.iterations
    assert len(report.update_norms) == report.iterations
    assert report.update_norms[-1] < 1e-12
    exact = sample(grid, spec.exact)
    assert np.abs(report.final.values - exact.values).max() < 5e-3


def test_bellman_solve_preserves_boundary_bit_exactly():
    spec = catalog("trigonometric")
    grid = build_grid(*spec.domain, 17)
    phi = sample(grid, spec.boundary)
    report = bellman_solve(spec, grid)
    for sl in (np.s_[0, :], np.s_[-1, :], np.s_[:, 0], np.s_[:, -1]):
        assert (report.final.values[sl] == phi.values[sl]).all()


def test_bellman_solve_is_deterministic():
    spec = catalog("degenerate")
    grid = build_grid(*spec.domain, 21)
    r1 = bellman_solve(spec, grid)
    r2 = bellman_solve(spec, grid)
    assert r1.update_norms == r2.update_norms
    assert r1.marked_counts == r2.marked_counts
    assert (r1.final.values == r2.final.values).all()


def test_bellman_solve_zero_rhs_stagnates_at_poisson_solution():
    spec = catalog("abs_x")
    grid = build_grid(*spec.domain, 31)
    report = bellman_solve(spec, grid)
    assert report.converged
    assert report.iterations == 2  # warm start plus one stagnant step
    assert report.marked_counts[-1] == grid.num_interior ** 2
    u0 = poisson_start(spec, grid)
    assert np.abs(report.final.values - u0.values).max() <= 1e-12


def test_interpolation_toggle_changes_marked_iterations():
    spec = catalog("reg_degenerate", epsilon=0.1)
    grid = build_grid(*spec.domain, 63)
    on = bellman_solve(spec, grid, SolverConfig(max_iterations=4))
    off = bellman_solve(spec, grid, SolverConfig(max_iterations=4, interpolation_enabled=False))
    assert on.marked_counts[1] == off.marked_counts[1] > 0
    # the second step already sees different coefficients
    assert (on.final.values != off.final.values).any()


def test_non_convergence_is_reported_not_raised():
    spec = catalog("standard")
    grid = build_grid(*spec.domain, 31)
    report = bellman_solve(spec, grid, SolverConfig(max_iterations=2))
    assert not report.converged
    assert report.iterations == 2
