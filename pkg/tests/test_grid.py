import math

import numpy as np
import pytest

from masolve.errors import GridMismatchError, NonFiniteValueError
from masolve.grid import (
    ScalarField,
    build_grid,
    field_from_interior,
    is_boundary,
    sample,
    sample_interior,
)


def test_build_grid_spacing_and_coordinates():
    g = build_grid(-1, 1, -1, 1, 3)
    assert g.h_x == 1.0 and g.h_y == 1.0
    assert g.coordinate(1, 1) == (0.0, 0.0)

    g = build_grid(0, 1, 0, 1, 11)
    assert g.h_x == pytest.approx(0.1, abs=0)
    assert g.coordinate(0, 0) == (0.0, 0.0)
    assert g.coordinate(10, 10) == pytest.approx((1.0, 1.0))


@pytest.mark.parametrize(
    "bounds",
    [(-1, 1, -1, 1, 2), (1, -1, 0, 1, 5), (0, 1, 1, 1, 5), (0, 0, 0, 1, 5)],
)
def test_build_grid_rejects_bad_bounds(bounds):
    with pytest.raises(ValueError):
        build_grid(*bounds)


def test_sample_constant_and_linear():
    g = build_grid(-1, 1, -1, 1, 3)
    zero = sample(g, lambda x, y: 0.0 * x)
    assert (zero.values == 0).all()

    lin = sample(g, lambda x, y: x)
    assert lin.values[:, 0].tolist() == [-1.0, 0.0, 1.0]
    assert (lin.values == lin.values[:, :1]).all()  # constant along y

    # scalar-constant return values broadcast
    const = sample(g, lambda x, y: 2.5)
    assert (const.values == 2.5).all()


def test_sample_round_trip_is_bit_exact():
    g = build_grid(-1.3, 0.7, 0.1, 2.4, 9)
    fn = lambda x, y: np.exp(0.5 * (x * x + y * y)) - x * y
    field = sample(g, fn)
    for i in range(g.n):
        for j in range(g.n):
            x, y = g.coordinate(i, j)
            assert field.values[i, j] == fn(x, y)


def test_sample_pointwise_fallback_for_scalar_only_functions():
    g = build_grid(0, 1, 0, 1, 5)
    scalar_only = lambda x, y: math.exp(x) + y  # rejects arrays
    field = sample(g, scalar_only)
    assert field.values[4, 0] == pytest.approx(math.e)


def test_sample_rejects_nonfinite_at_corner():
    # 2/(2 - x^2 - y^2)^2 is infinite exactly at the corner (1, 1)
    g = build_grid(0, 1, 0, 1, 5)
    f = lambda x, y: 2.0 / (2.0 - x * x - y * y) ** 2
    with pytest.raises(NonFiniteValueError):
        sample(g, f)
    # interior-only sampling avoids the boundary singularity
    inner = sample_interior(g, f)
    assert np.isfinite(inner).all()
    assert inner.shape == (3, 3)


def test_is_boundary_classification():
    g = build_grid(-1, 1, -1, 1, 5)
    assert is_boundary(g, 0, 3)
    assert not is_boundary(g, 2, 2)
    assert is_boundary(g, 4, 4)
    with pytest.raises(IndexError):
        is_boundary(g, 5, 0)
    with pytest.raises(IndexError):
        is_boundary(g, 0, -1)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_boundary_count(n):
    g = build_grid(0, 1, 0, 1, n)
    count = sum(is_boundary(g, i, j) for i in range(n) for j in range(n))
    assert count == 4 * n - 4


def test_scalar_field_validation_and_immutability():
    g = build_grid(0, 1, 0, 1, 4)
    with pytest.raises(GridMismatchError):
        ScalarField(g, np.zeros((3, 3)))
    with pytest.raises(NonFiniteValueError):
        ScalarField(g, np.full((4, 4), np.nan))
    field = ScalarField(g, np.ones((4, 4)))
    with pytest.raises(ValueError):
        field.values[0, 0] = 2.0


def test_field_from_interior_embeds_boundary_bit_exactly():
    g = build_grid(0, 1, 0, 1, 5)
    phi = sample(g, lambda x, y: x + 2 * y)
    inner = np.full((3, 3), 7.0)
    field = field_from_interior(g, inner, boundary=phi)
    assert (field.values[1:-1, 1:-1] == 7.0).all()
    assert (field.values[0, :] == phi.values[0, :]).all()
    assert (field.values[:, -1] == phi.values[:, -1]).all()
    bare = field_from_interior(g, inner)
    assert (bare.values[0, :] == 0).all()
