"""Error norms, convergence-order fits and convexity diagnostics."""

from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from .bellman_core import positive_definite_mask
from .errors import GridMismatchError
from .fdops import hessian
from .grid import ScalarField


@dataclasses.dataclass(frozen=True)
class ErrorSummary:
    """Sup and discrete-L2 distances between a solution and a reference.

    ``l2_error`` is the mesh-weighted norm sqrt(h_x*h_y) * ||e||_2 (a
    discrete surrogate of the L2(domain) norm, comparable across mesh
    sizes); ``l2_error_raw`` is the unweighted vector 2-norm.  Norms run
    over all nodes; boundary rows contribute nothing for iterates that
    carry the same Dirichlet data as the reference.
    """

    sup_error: float
    l2_error: float
    l2_error_raw: float
    n: int


def error_summary(u: ScalarField, exact: ScalarField) -> ErrorSummary:
    """Error norms of ``u`` against a reference field on the same grid."""
    if u.grid != exact.grid:
        raise GridMismatchError("solution and reference live on different grids")
    diff = u.values - exact.values
    raw = float(np.sqrt((diff * diff).sum()))
    weight = float(np.sqrt(u.grid.h_x * u.grid.h_y))
    return ErrorSummary(
        sup_error=float(np.abs(diff).max()),
        l2_error=weight * raw,
        l2_error_raw=raw,
        n=u.grid.n,
    )


def order_fit(ns: Sequence[int], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(N).

    An error decaying like N^(-p) yields a slope of -p.  Requires at least
    two data points, positive throughout.
    """
    ns = np.asarray(ns, dtype=np.float64)
    errors = np.asarray(errors, dtype=np.float64)
    if len(ns) < 2 or len(errors) != len(ns):
        raise ValueError("need at least two (N, error) pairs")
    if (ns <= 0).any() or (errors <= 0).any():
        raise ValueError("mesh sizes and errors must be positive")
    slope, _ = np.polyfit(np.log(ns), np.log(errors), 1)
    return float(slope)


def convexity_diagnostics(u: ScalarField, det_floor: float = 0.0) -> tuple[int, np.ndarray]:
    """Count and locate interior nodes whose discrete Hessian is not PD.

    With the default zero floor a node is flagged exactly when hxx <= 0 or
    hxx*hyy - hxy^2 <= 0.  Returns the count and a full-grid boolean mask
    (False on the boundary, where no Hessian is defined).
    """
    h = hessian(u)
    failures = ~positive_definite_mask(h.hxx, h.hxy, h.hyy, det_floor)
    mask = np.zeros((u.grid.n, u.grid.n), dtype=bool)
    mask[1:-1, 1:-1] = failures
    return int(failures.sum()), mask


def monotonicity_margin(u: ScalarField, exact: ScalarField) -> float:
    """min(u - exact) over the grid.

    Convex solutions of the linearized trace equation majorize the true
    solution, so for convex iterates on smooth problems this should not
    fall below -C*h^2 (the h^2 slack absorbs discretization error).
    """
    if u.grid != exact.grid:
        raise GridMismatchError("solution and reference live on different grids")
    return float((u.values - exact.values).min())
