import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masolve.bellman_solver import bellman_solve
from masolve.errors import NegativeRadicandError
from masolve.grid import build_grid, field_from_interior, sample
from masolve.problems import ProblemSpec, catalog
from masolve.reference_methods import (
    M1Config,
    M2Config,
    m1_solve,
    m1_update,
    m2_solve,
    m2_update_rhs,
)

finite = st.floats(min_value=-100, max_value=100, allow_nan=False)


def test_config_validation():
    with pytest.raises(ValueError):
        M1Config(root_selection="other")
    with pytest.raises(ValueError):
        M1Config(tolerance=-1)
    with pytest.raises(ValueError):
        M2Config(max_iterations=0)


def test_m2_update_fixed_point():
    # u = (x^2+y^2)/2 has lap u = 2 and det D^2 u = 1 = f, so g stays 2.
    grid = build_grid(-1, 1, -1, 1, 9)
    u = sample(grid, lambda x, y: 0.5 * (x * x + y * y))
    f = field_from_interior(grid, np.ones((7, 7)))
    g = m2_update_rhs(u, f)
    assert np.abs(g.interior - 2.0).max() < 1e-12
    assert (g.values[0, :] == 0).all()


def test_m2_update_clamp_and_error_paths():
    # A negative f forces the radicand negative: with u = (x^2+y^2)/2,
    # r = 4 + 2(f - 1) = -2 for f = -2.
    grid = build_grid(-1, 1, -1, 1, 9)
    u = sample(grid, lambda x, y: 0.5 * (x * x + y * y))
    f = field_from_interior(grid, np.full((7, 7), -2.0))
    clamped = m2_update_rhs(u, f, clamp=True)
    assert (clamped.interior == 0.0).all()
    with pytest.raises(NegativeRadicandError):
        m2_update_rhs(u, f, clamp=False)


def test_m2_update_radicand_nonnegative_for_admissible_f():
    # det <= (lap/2)^2 for symmetric matrices, so the radicand is bounded
    # below by (lap u)^2/2 + 2f >= 0 whenever f >= 0.
    rng = np.random.default_rng(7)
    grid = build_grid(-1, 1, -1, 1, 12)
    f = field_from_interior(grid, rng.uniform(0, 5, (10, 10)))
    for _ in range(20):
        u = field_from_interior(grid, rng.normal(size=(10, 10)))
        g = m2_update_rhs(u, f, clamp=False)  # must not raise
        assert (g.interior >= 0).all()


def test_m2_solve_quadratic_fixed_point_two_iterations():
    spec = ProblemSpec(
        "quad", -1, 1, -1, 1, lambda x, y: 4.0 + 0 * x, lambda x, y: x * x + y * y
    )
    grid = build_grid(*spec.domain, 9)
    report = m2_solve(spec, grid)
    assert report.converged
    assert report.iterations <= 2
    X, Y = grid.mesh()
    assert np.abs(report.final.values - (X * X + Y * Y)).max() < 1e-10


def test_m2_solve_standard_iteration_band():
    spec = catalog("standard")
    report = m2_solve(spec, build_grid(*spec.domain, 31))
    assert report.converged
    assert 30 <= report.iterations <= 70


def test_m2_solve_degenerate_counts_and_growth():
    spec = catalog("degenerate")
    iterations = []
    for n in (31, 63):
        report = m2_solve(spec, build_grid(*spec.domain, n))
        assert report.converged
        iterations.append(report.iterations)
    assert abs(iterations[0] - 260) <= 0.25 * 260
    assert abs(iterations[1] - 452) <= 0.25 * 452
    assert iterations[0] < iterations[1]


def test_m1_update_examples():
    # linear data is a fixed point for either root
    assert m1_update(3.0, 3.0, 3.0, 3.0, 0.1, 0.0, "smaller") == 3.0
    assert m1_update(3.0, 3.0, 3.0, 3.0, 0.1, 0.0, "as_printed") == 3.0
    # a1 = a2 = a3 = a4 = 0, h^4 f = 4
    assert m1_update(0, 0, 0, 0, 1.0, 4.0, "smaller") == -1.0
    assert m1_update(0, 0, 0, 0, 1.0, 4.0, "as_printed") == 1.0
    # convexity boundary case: result is min(a1, a2)
    assert m1_update(1.0, 0.0, 0.5, 0.5, 1.0, 0.0, "smaller") == 0.0
    with pytest.raises(ValueError):
        m1_update(0, 0, 0, 0, 1.0, 0.0, "bogus")


@given(finite, finite, finite, finite, st.floats(min_value=1e-3, max_value=10),
       st.floats(min_value=0, max_value=1e4))
@settings(max_examples=300, deadline=None)
def test_m1_smaller_root_enforces_local_convexity(a1, a2, a3, a4, h, f):
    u = m1_update(a1, a2, a3, a4, h, f, "smaller")
    scale = max(1.0, abs(a1), abs(a2), abs(a3), abs(a4))
    assert u <= min(a1, a2) + 1e-12 * scale


def test_m1_solve_linear_data_converges_in_one_sweep():
    spec = ProblemSpec("lin", -1, 1, -1, 1, lambda x, y: 0 * x, lambda x, y: x - 2 * y)
    grid = build_grid(*spec.domain, 9)
    report = m1_solve(spec, grid)
    assert report.converged
    assert report.iterations == 1
    X, Y = grid.mesh()
    assert np.abs(report.final.values - (X - 2 * Y)).max() < 1e-11


def test_m1_solve_requires_square_spacing():
    spec = catalog("standard")
    with pytest.raises(ValueError):
        m1_solve(spec, build_grid(-1, 1, 0, 1, 9))


def test_m1_solve_degenerate_iteration_count():
    spec = catalog("degenerate")
    report = m1_solve(spec, build_grid(*spec.domain, 31))
    assert report.converged
    assert abs(report.iterations - 1990) <= 0.5 * 1990


def test_m1_sweep_matches_scalar_updates():
    # drive the compiled sweep against a pure-python Gauss-Seidel built
    # from the public single-node update
    spec = catalog("standard")
    grid = build_grid(*spec.domain, 7)
    config = M1Config(max_iterations=3)
    report = m1_solve(spec, grid, config)

    from masolve.bellman_solver import poisson_start
    from masolve.grid import sample_interior

    v = poisson_start(spec, grid).values.copy()
    f = sample_interior(grid, spec.rhs)
    h = grid.h_x
    for _ in range(3):
        for j in range(1, grid.n - 1):
            for i in range(1, grid.n - 1):
                a1 = 0.5 * (v[i + 1, j] + v[i - 1, j])
                a2 = 0.5 * (v[i, j + 1] + v[i, j - 1])
                a3 = 0.5 * (v[i + 1, j + 1] + v[i - 1, j - 1])
                a4 = 0.5 * (v[i - 1, j + 1] + v[i + 1, j - 1])
                v[i, j] = m1_update(a1, a2, a3, a4, h, f[i - 1, j - 1], "smaller")
    np.testing.assert_allclose(report.final.values, v, rtol=0, atol=1e-14)


def test_m1_as_printed_root_differs():
    spec = catalog("standard")
    grid = build_grid(*spec.domain, 9)
    smaller = m1_solve(spec, grid, M1Config(max_iterations=2))
    printed = m1_solve(spec, grid, M1Config(max_iterations=2, root_selection="as_printed"))
    assert (smaller.final.values != printed.final.values).any()


@pytest.mark.parametrize("name,params", [
    ("standard", {}),
    ("trigonometric", {}),
    ("reg_degenerate", {"epsilon": 0.1}),
])
@pytest.mark.parametrize("n", [31, 63])
def test_cross_method_agreement(name, params, n):
    spec = catalog(name, **params)
    grid = build_grid(*spec.domain, n)
    fields = [
        bellman_solve(spec, grid).final.values,
        m1_solve(spec, grid).final.values,
        m2_solve(spec, grid).final.values,
    ]
    for a in range(3):
        for b in range(a + 1, 3):
            assert np.abs(fields[a] - fields[b]).max() <= 1e-6


def test_reports_carry_per_iteration_diagnostics():
    spec = catalog("standard")
    grid = build_grid(*spec.domain, 17)
    for report in (m1_solve(spec, grid), m2_solve(spec, grid)):
        assert len(report.update_norms) == report.iterations
        assert len(report.marked_counts) == report.iterations
        assert report.update_norms[-1] < 1e-12
