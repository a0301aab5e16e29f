"""Uniform node-centered rectangular meshes and scalar fields on them.

The mesh covers a closed rectangle [x_min, x_max] x [y_min, y_max] with
``n`` nodes per side, boundary nodes included.  Index convention: entry
``(i, j)`` of a field corresponds to the point ``(x_min + i*h_x,
y_min + j*h_y)``, so axis 0 runs along x and axis 1 along y.  All stencil
code in this package documents its offsets in that convention.
"""

from __future__ import annotations

import dataclasses
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import GridMismatchError, NonFiniteValueError


@dataclasses.dataclass(frozen=True)
class GridSpec:
    """Geometry of a uniform n-by-n mesh over a rectangle.

    Spacings are derived, ``h_x = (x_max - x_min)/(n - 1)`` and analogously
    for ``h_y``; every catalogued experiment uses a square domain where the
    two coincide.
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"need at least 3 points per side, got n={self.n}")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError(
                f"domain corners must be ordered, got "
                f"[{self.x_min}, {self.x_max}] x [{self.y_min}, {self.y_max}]"
            )
        for v in (self.x_min, self.x_max, self.y_min, self.y_max):
            if not np.isfinite(v):
                raise ValueError("domain corners must be finite")

    @property
    def h_x(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def h_y(self) -> float:
        return (self.y_max - self.y_min) / (self.n - 1)

    @property
    def num_interior(self) -> int:
        """Number of interior nodes per side."""
        return self.n - 2

    @cached_property
    def xs(self) -> np.ndarray:
        xs = self.x_min + np.arange(self.n) * self.h_x
        xs.setflags(write=False)
        return xs

    @cached_property
    def ys(self) -> np.ndarray:
        ys = self.y_min + np.arange(self.n) * self.h_y
        ys.setflags(write=False)
        return ys

    def coordinate(self, i: int, j: int) -> tuple[float, float]:
        """Physical coordinates of node (i, j)."""
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError(f"node ({i}, {j}) outside 0..{self.n - 1}")
        return float(self.xs[i]), float(self.ys[j])

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate matrices (X, Y), each of shape (n, n), axis 0 = x."""
        return np.meshgrid(self.xs, self.ys, indexing="ij")

    def interior_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate matrices restricted to interior nodes, shape (n-2, n-2)."""
        X, Y = self.mesh()
        return X[1:-1, 1:-1], Y[1:-1, 1:-1]


@dataclasses.dataclass(frozen=True)
class ScalarField:
    """An n-by-n array of real values attached to a :class:`GridSpec`.

    Values are copied, coerced to float64 and frozen; every field is
    guaranteed finite.  Operations that could produce NaN/inf must raise
    instead of constructing a field.
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, order="C", copy=True)
        if values.shape != (self.grid.n, self.grid.n):
            raise GridMismatchError(
                f"field shape {values.shape} does not match grid n={self.grid.n}"
            )
        if not np.isfinite(values).all():
            raise NonFiniteValueError("scalar field contains NaN or infinity")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def interior(self) -> np.ndarray:
        """Read-only view of the interior block, shape (n-2, n-2)."""
        return self.values[1:-1, 1:-1]


def build_grid(x_min: float, x_max: float, y_min: float, y_max: float, n: int) -> GridSpec:
    """Construct a uniform n-by-n grid over the given rectangle.

    Requires ``n >= 3`` and properly ordered corners; raises ``ValueError``
    otherwise.
    """
    return GridSpec(float(x_min), float(x_max), float(y_min), float(y_max), int(n))


def _evaluate(fn: Callable, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Evaluate a pointwise function on coordinate matrices.

    Array-capable callables are evaluated in one shot; scalar-only callables
    fall back to a per-node loop.  Scalar (constant) return values are
    broadcast.
    """
    # Non-finite results become NonFiniteValueError at the call sites, so
    # numpy's intermediate divide/overflow warnings are suppressed here.
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        try:
            vals = np.asarray(fn(X, Y), dtype=np.float64)
            if vals.shape != X.shape:
                vals = np.broadcast_to(vals, X.shape)
            return np.array(vals, dtype=np.float64)
        except (TypeError, ValueError):
            out = np.empty_like(X)
            for idx in np.ndindex(X.shape):
                out[idx] = float(fn(X[idx], Y[idx]))
            return out


def _first_bad_node(values: np.ndarray, X: np.ndarray, Y: np.ndarray) -> str:
    bad = ~np.isfinite(values)
    i, j = next(zip(*np.nonzero(bad)))
    return f"({X[i, j]:g}, {Y[i, j]:g})"


def sample(grid: GridSpec, fn: Callable) -> ScalarField:
    """Tabulate ``fn(x, y)`` at every node of the grid.

    Raises :class:`NonFiniteValueError` if the function is NaN or infinite
    at any node (including boundary nodes; use :func:`sample_interior` for
    right-hand sides that blow up on the boundary).
    """
    X, Y = grid.mesh()
    values = _evaluate(fn, X, Y)
    if not np.isfinite(values).all():
        raise NonFiniteValueError(
            f"sampled function is not finite at node {_first_bad_node(values, X, Y)}"
        )
    return ScalarField(grid, values)


def sample_interior(grid: GridSpec, fn: Callable) -> np.ndarray:
    """Tabulate ``fn`` at interior nodes only, returning an (n-2, n-2) array.

    The discrete equation is only imposed at interior nodes, so functions
    that are singular on the boundary (the unbounded right-hand side at a
    domain corner, say) are still admissible here.
    """
    X, Y = grid.interior_mesh()
    values = _evaluate(fn, X, Y)
    if not np.isfinite(values).all():
        raise NonFiniteValueError(
            f"sampled function is not finite at interior node "
            f"{_first_bad_node(values, X, Y)}"
        )
    return values


def is_boundary(grid: GridSpec, i: int, j: int) -> bool:
    """True iff node (i, j) lies on the boundary of the rectangle."""
    if not (0 <= i < grid.n and 0 <= j < grid.n):
        raise IndexError(f"node ({i}, {j}) outside 0..{grid.n - 1}")
    return i in (0, grid.n - 1) or j in (0, grid.n - 1)


def field_from_interior(grid: GridSpec, interior: np.ndarray, boundary: ScalarField | None = None) -> ScalarField:
    """Assemble a full field from interior values plus boundary data.

    Boundary nodes take their values from ``boundary`` when given
    (bit-exactly) and are zero otherwise.
    """
    m = grid.num_interior
    interior = np.asarray(interior, dtype=np.float64)
    if interior.shape != (m, m):
        raise GridMismatchError(
            f"interior block shape {interior.shape}, expected {(m, m)}"
        )
    if boundary is not None:
        if boundary.grid != grid:
            raise GridMismatchError("boundary field lives on a different grid")
        full = boundary.values.copy()
    else:
        full = np.zeros((grid.n, grid.n))
    full[1:-1, 1:-1] = interior
    return ScalarField(grid, full)
