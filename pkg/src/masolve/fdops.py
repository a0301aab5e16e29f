"""Second-order narrow-stencil difference operators and system assembly.

All operators act on interior nodes only and use the standard central
stencils: three-point second differences along each axis and the
four-corner cross difference for the mixed derivative.  They are exact on
quadratic polynomials, which the test suite exploits as a manufactured
solution oracle.
"""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

import numpy as np

from .errors import GridMismatchError
from .grid import GridSpec, ScalarField

if TYPE_CHECKING:
    from .bellman_core import BellmanField


@dataclasses.dataclass(frozen=True)
class HessianField:
    """Discrete Hessian entries at interior nodes, shape (n-2, n-2) each.

    ``hxy`` stores the single off-diagonal entry; the matrix at each node is
    symmetric by construction.
    """

    grid: GridSpec
    hxx: np.ndarray
    hxy: np.ndarray
    hyy: np.ndarray

    def determinant(self) -> np.ndarray:
        return self.hxx * self.hyy - self.hxy**2


@dataclasses.dataclass(frozen=True)
class LinearSystem:
    """Sparse linear system in coordinate (row, col, value) form.

    Unknowns are the interior nodes in lexicographic order with the
    x-index fastest: node (i, j) maps to row ``(i-1) + (j-1)*(n-2)``.
    Each row holds at most 9 entries (the 9-point stencil footprint).
    """

    dimension: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    rhs: np.ndarray

    def entries(self) -> list[tuple[int, int, float]]:
        """Materialize the coefficient list (mainly for tests)."""
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.values.tolist()))


def _flat(a: np.ndarray) -> np.ndarray:
    # Interior (m, m) block -> vector in unknown order (x-index fastest).
    return a.ravel(order="F")


def unflatten_interior(x: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Inverse of the unknown ordering: vector -> (n-2, n-2) interior block."""
    m = grid.num_interior
    return x.reshape((m, m), order="F")


def hessian(u: ScalarField) -> HessianField:
    """Central-difference Hessian of ``u`` at the interior nodes.

    Nodes adjacent to the boundary consume the known boundary values of
    ``u``; no one-sided stencils are involved.
    """
    g = u.grid
    v = u.values
    hx2, hy2 = g.h_x**2, g.h_y**2
    hxx = (v[2:, 1:-1] - 2.0 * v[1:-1, 1:-1] + v[:-2, 1:-1]) / hx2
    hyy = (v[1:-1, 2:] - 2.0 * v[1:-1, 1:-1] + v[1:-1, :-2]) / hy2
    hxy = (v[2:, 2:] - v[2:, :-2] - v[:-2, 2:] + v[:-2, :-2]) / (4.0 * g.h_x * g.h_y)
    return HessianField(g, hxx, hxy, hyy)


def laplacian(u: ScalarField) -> ScalarField:
    """Five-point Laplacian of ``u``; boundary entries of the result are 0."""
    g = u.grid
    v = u.values
    out = np.zeros_like(v)
    out[1:-1, 1:-1] = (
        (v[2:, 1:-1] - 2.0 * v[1:-1, 1:-1] + v[:-2, 1:-1]) / g.h_x**2
        + (v[1:-1, 2:] - 2.0 * v[1:-1, 1:-1] + v[1:-1, :-2]) / g.h_y**2
    )
    return ScalarField(g, out)


def ma_determinant(u: ScalarField) -> ScalarField:
    """Determinant of the discrete Hessian; boundary entries are 0."""
    h = hessian(u)
    out = np.zeros((u.grid.n, u.grid.n))
    out[1:-1, 1:-1] = h.determinant()
    return ScalarField(u.grid, out)


def assemble_trace_system(
    b: "BellmanField", rhs_interior: ScalarField, boundary: ScalarField
) -> LinearSystem:
    """Discretize ``tr(B(x) D^2 u) = rhs`` with Dirichlet data ``boundary``.

    Builds, row by interior node, ``b11*Dxx + 2*b12*Dxy + b22*Dyy = rhs``
    with the central stencils of :func:`hessian`.  Stencil legs that land on
    the boundary are moved to the right-hand side with their sign flipped
    (the Dirichlet values are known).  Zero coefficients are dropped, so a
    unit coefficient field yields exactly the 5-point Poisson system.
    """
    g = b.grid
    if rhs_interior.grid != g or boundary.grid != g:
        raise GridMismatchError("coefficient, rhs and boundary grids differ")
    n, m = g.n, g.num_interior
    hx2, hy2 = g.h_x**2, g.h_y**2
    cross = 1.0 / (2.0 * g.h_x * g.h_y)

    I, J = np.meshgrid(np.arange(1, n - 1), np.arange(1, n - 1), indexing="ij")
    row_of_node = _flat((I - 1) + (J - 1) * m)
    rhs = _flat(rhs_interior.interior).copy()

    stencil = (
        (0, 0, -2.0 * b.b11 / hx2 - 2.0 * b.b22 / hy2),
        (1, 0, b.b11 / hx2),
        (-1, 0, b.b11 / hx2),
        (0, 1, b.b22 / hy2),
        (0, -1, b.b22 / hy2),
        (1, 1, b.b12 * cross),
        (-1, -1, b.b12 * cross),
        (1, -1, -b.b12 * cross),
        (-1, 1, -b.b12 * cross),
    )
    rows, cols, vals = [], [], []
    for di, dj, coef in stencil:
        c = _flat(coef)
        ni, nj = _flat(I + di), _flat(J + dj)
        nonzero = c != 0.0
        inside = (ni >= 1) & (ni <= n - 2) & (nj >= 1) & (nj <= n - 2)
        keep = nonzero & inside
        rows.append(row_of_node[keep])
        cols.append((ni[keep] - 1) + (nj[keep] - 1) * m)
        vals.append(c[keep])
        to_boundary = nonzero & ~inside
        if to_boundary.any():
            rhs[row_of_node[to_boundary]] -= (
                c[to_boundary] * boundary.values[ni[to_boundary], nj[to_boundary]]
            )
    return LinearSystem(
        dimension=m * m,
        rows=np.concatenate(rows),
        cols=np.concatenate(cols),
        values=np.concatenate(vals),
        rhs=rhs,
    )
