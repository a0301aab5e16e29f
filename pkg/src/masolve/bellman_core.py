"""Pointwise Bellman-matrix algebra for symmetric 2x2 matrices.

For a positive definite symmetric M, the arithmetic-geometric mean
inequality applied to the eigenvalues of B M gives

    sqrt(det M) = (1/2) * inf { tr(B M) : B symmetric positive definite,
                                det B = 1 },

and the infimum is attained at B = sqrt(det M) * M^{-1}.  In two dimensions
the diagonalize/invert/conjugate-back construction of that minimizer
collapses algebraically to the closed form adj(M)/sqrt(det M), which is
what :func:`bellman_matrix` computes; no eigensolver is needed and
``det B = 1`` holds to roundoff by construction.

Grid-level helpers build the coefficient field for the linearized trace
equation from a discrete Hessian, marking nodes where positive
definiteness fails, and repair marked nodes by determinant-renormalized
averaging of their nearest unmarked axis neighbors.
"""

from __future__ import annotations

import dataclasses
import math
from typing import TYPE_CHECKING

import numpy as np

from .errors import MASolveError, NotPositiveDefiniteError
from .grid import GridSpec

if TYPE_CHECKING:
    from .fdops import HessianField

#: Entries of a repaired or constructed field must satisfy |det - 1| below
#: this bound (identity-fallback nodes satisfy it exactly).
DET_ONE_TOLERANCE = 1e-8


@dataclasses.dataclass(frozen=True)
class SymMatrix2:
    """Symmetric 2x2 matrix stored as its three independent entries."""

    a11: float
    a12: float
    a22: float

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a12

    @property
    def trace(self) -> float:
        return self.a11 + self.a22

    def product_trace(self, other: "SymMatrix2") -> float:
        """tr(self @ other) for symmetric factors."""
        return self.a11 * other.a11 + 2.0 * self.a12 * other.a12 + self.a22 * other.a22


IDENTITY = SymMatrix2(1.0, 0.0, 1.0)


@dataclasses.dataclass(frozen=True)
class BellmanField:
    """Coefficient matrices for the trace equation at every interior node.

    ``marked`` flags the nodes where the source Hessian failed the positive
    definiteness test; their entries are placeholders (identity) until
    :func:`interpolate_marked` repairs them.  Unmarked entries always carry
    determinant 1 up to roundoff.
    """

    grid: GridSpec
    b11: np.ndarray
    b12: np.ndarray
    b22: np.ndarray
    marked: np.ndarray

    def __post_init__(self):
        m = self.grid.num_interior
        for name in ("b11", "b12", "b22"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (m, m):
                raise ValueError(f"{name} must have shape {(m, m)}, got {arr.shape}")
            object.__setattr__(self, name, arr)
        marked = np.asarray(self.marked, dtype=bool)
        if marked.shape != (m, m):
            raise ValueError(f"marked mask must have shape {(m, m)}")
        object.__setattr__(self, "marked", marked)

    @property
    def marked_count(self) -> int:
        return int(self.marked.sum())


def positive_definite_mask(
    a11: np.ndarray, a12: np.ndarray, a22: np.ndarray, det_floor: float
) -> np.ndarray:
    """Sylvester test with a determinant floor, vectorized over nodes.

    A matrix passes iff ``a11 > 0`` and ``det > det_floor``; the floor keeps
    near-degenerate Hessians (whose minimizing matrix would blow up like
    1/sqrt(det)) out of the coefficient field.
    """
    if det_floor < 0:
        raise ValueError("det_floor must be nonnegative")
    return (a11 > 0.0) & (a11 * a22 - a12 * a12 > det_floor)


def is_positive_definite(m: SymMatrix2, det_floor: float = 0.0) -> bool:
    """Scalar form of :func:`positive_definite_mask`."""
    return bool(positive_definite_mask(m.a11, m.a12, m.a22, det_floor))


def bellman_matrix(h: SymMatrix2, det_floor: float = 0.0) -> SymMatrix2:
    """Minimizer of tr(B h) over det-1 positive definite symmetric B.

    Closed form ``adj(h)/sqrt(det h)``; satisfies ``det B = 1`` and
    ``tr(B h) = 2 sqrt(det h)``.  Raises
    :class:`NotPositiveDefiniteError` when ``h`` fails the definiteness
    test at the given floor.
    """
    if not is_positive_definite(h, det_floor):
        raise NotPositiveDefiniteError(
            f"matrix ({h.a11}, {h.a12}, {h.a22}) is not positive definite "
            f"(det floor {det_floor:g})"
        )
    s = math.sqrt(h.det)
    return SymMatrix2(h.a22 / s, -h.a12 / s, h.a11 / s)


def bellman_lower_bound_check(m: SymMatrix2, b: SymMatrix2) -> bool:
    """Check tr(b m)/2 >= sqrt(det m) - 1e-9 for the admissible pair.

    ``m`` must be positive semi-definite and ``b`` positive definite with
    determinant 1 up to :data:`DET_ONE_TOLERANCE`; violations raise
    ``ValueError``.  Used as the property-test oracle for the trace
    inequality in two dimensions.
    """
    slack = 1e-9
    if m.a11 < -slack or m.a22 < -slack or m.det < -slack:
        raise ValueError("first argument must be positive semi-definite")
    if not (b.a11 > 0.0 and b.det > 0.0 and abs(b.det - 1.0) <= DET_ONE_TOLERANCE):
        raise ValueError("second argument must be positive definite with det 1")
    return b.product_trace(m) / 2.0 >= math.sqrt(max(m.det, 0.0)) - slack


def identity_bellman_field(grid: GridSpec) -> BellmanField:
    """All-identity coefficient field (the Poisson warm-start operator)."""
    m = grid.num_interior
    return BellmanField(
        grid,
        np.ones((m, m)),
        np.zeros((m, m)),
        np.ones((m, m)),
        np.zeros((m, m), dtype=bool),
    )


def bellman_field_from_hessian(hess: "HessianField", det_floor: float) -> BellmanField:
    """Pointwise minimizing matrices where the Hessian is positive definite.

    Nodes failing the definiteness test are marked and temporarily set to
    the identity; callers normally follow up with
    :func:`interpolate_marked`.
    """
    det = hess.hxx * hess.hyy - hess.hxy**2
    pd = positive_definite_mask(hess.hxx, hess.hxy, hess.hyy, det_floor)
    s = np.sqrt(np.where(pd, det, 1.0))
    b11 = np.where(pd, hess.hyy / s, 1.0)
    b12 = np.where(pd, -hess.hxy / s, 0.0)
    b22 = np.where(pd, hess.hxx / s, 1.0)
    return BellmanField(hess.grid, b11, b12, b22, ~pd)


def _nearest_unmarked(unmarked: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per column of axis 0: nearest unmarked index at-or-before / at-or-after.

    Sentinels are -1 (nothing before) and m (nothing after).  Marked query
    points never match themselves because only unmarked entries are
    candidates.
    """
    m = unmarked.shape[0]
    idx = np.arange(m)[:, None]
    prev = np.maximum.accumulate(np.where(unmarked, idx, -1), axis=0)
    nxt_rev = np.maximum.accumulate(np.where(unmarked[::-1, :], idx, -1), axis=0)[::-1, :]
    nxt = np.where(nxt_rev >= 0, m - 1 - nxt_rev, m)
    return prev, nxt


def interpolate_marked(field: BellmanField) -> BellmanField:
    """Repair marked nodes from their nearest unmarked axis neighbors.

    For each marked node the nearest unmarked interior node in each of the
    four axis directions (same row to the left/right, same column up/down)
    is located using the input mask only, so repairs never cascade within a
    pass.  The found matrices are averaged with equal weight and the
    average is renormalized to determinant 1.  The Minkowski determinant
    inequality guarantees the average of determinant-1 positive definite
    matrices has determinant >= 1, so the renormalization is well posed;
    this is asserted before dividing.  A marked node with no unmarked node
    in any direction falls back to the identity.  Unmarked nodes pass
    through unchanged, as does a field with nothing marked.
    """
    marked = field.marked
    if not marked.any():
        return field
    m = marked.shape[0]
    unmarked = ~marked
    prev_x, next_x = _nearest_unmarked(unmarked)
    prev_y_t, next_y_t = _nearest_unmarked(unmarked.T)
    prev_y, next_y = prev_y_t.T, next_y_t.T

    I = np.broadcast_to(np.arange(m)[:, None], (m, m))
    J = np.broadcast_to(np.arange(m)[None, :], (m, m))
    num11 = np.zeros((m, m))
    num12 = np.zeros((m, m))
    num22 = np.zeros((m, m))
    weight_sum = np.zeros((m, m))
    for neighbor_idx, along_x in ((prev_x, True), (next_x, True), (prev_y, False), (next_y, False)):
        found = (neighbor_idx >= 0) & (neighbor_idx <= m - 1)
        w = np.where(marked & found, 1.0, 0.0)
        k = np.clip(neighbor_idx, 0, m - 1)
        if along_x:
            s11, s12, s22 = field.b11[k, J], field.b12[k, J], field.b22[k, J]
        else:
            s11, s12, s22 = field.b11[I, k], field.b12[I, k], field.b22[I, k]
        num11 += w * s11
        num12 += w * s12
        num22 += w * s22
        weight_sum += w

    repaired = marked & (weight_sum > 0)
    ws = np.where(repaired, weight_sum, 1.0)
    avg11, avg12, avg22 = num11 / ws, num12 / ws, num22 / ws
    det = avg11 * avg22 - avg12**2
    if repaired.any() and det[repaired].min() < 1.0 - 1e-12:
        raise MASolveError(
            "determinant of averaged matrices dropped below 1; "
            "an unmarked entry must have violated the det-1 invariant"
        )
    s = np.sqrt(np.where(repaired, det, 1.0))
    b11 = np.where(repaired, avg11 / s, np.where(marked, 1.0, field.b11))
    b12 = np.where(repaired, avg12 / s, np.where(marked, 0.0, field.b12))
    b22 = np.where(repaired, avg22 / s, np.where(marked, 1.0, field.b22))
    return BellmanField(field.grid, b11, b12, b22, marked.copy())
