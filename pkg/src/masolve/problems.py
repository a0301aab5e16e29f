"""Catalog of Dirichlet test problems for det(D^2 u) = f on a rectangle.

Each entry bundles the domain, the right-hand side ``f >= 0``, the Dirichlet
boundary data ``phi``, the exact convex solution where one is known, and any
parameters.  Right-hand sides are only ever evaluated at interior mesh
nodes, which keeps entries with boundary singularities (``unbounded``) and
boundary zeros (``trigonometric``) well defined at every mesh size.

Names accepted by :func:`catalog` (also the identifiers used by the CLI):

====================  ==========================================================
standard              smooth, strictly convex; u = exp((x^2+y^2)/2) on [-1,1]^2
reg_degenerate        u = 0.5(x-0.5)^4 + eps*x^2 + y^2, parameter ``epsilon``
trigonometric         u = -cos(pi x/2) - cos(pi y/2) on [0,1]^2; f = 0 on two edges
degenerate            reg_degenerate with epsilon = 0; f vanishes on a line
constant_ma           f = 1, phi = 1 on [-1,1]^2; no exact solution known
circular              f vanishes on a disc of radius 0.2 about (0.5, 0.5)
unbounded             f blows up at the corner (1,1) of [0,1]^2
unbounded_trimmed     the same solution on [0, 0.99]^2, away from the blow-up
abs_x                 f = 0, phi = |x|; convex but nowhere strictly convex
====================  ==========================================================
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Mapping

import numpy as np

from .errors import NoExactSolutionError, UnknownProblemError
from .fdops import ma_determinant
from .grid import GridSpec, sample, sample_interior


@dataclasses.dataclass(frozen=True)
class ProblemSpec:
    """A Dirichlet problem instance: domain, data and (optional) solution."""

    name: str
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    rhs: Callable
    boundary: Callable
    exact: Callable | None = None
    params: Mapping[str, float] = dataclasses.field(default_factory=dict)

    @property
    def domain(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.x_max, self.y_min, self.y_max)


def _standard_exact(x, y):
    return np.exp(0.5 * (x * x + y * y))


def _standard_rhs(x, y):
    return (1.0 + x * x + y * y) * np.exp(x * x + y * y)


def _trig_exact(x, y):
    return -np.cos(0.5 * np.pi * x) - np.cos(0.5 * np.pi * y)


def _trig_rhs(x, y):
    return (0.5 * np.pi) ** 4 * np.cos(0.5 * np.pi * x) * np.cos(0.5 * np.pi * y)


def _unbounded_exact(x, y):
    return -np.sqrt(2.0 - x * x - y * y)


def _unbounded_rhs(x, y):
    return 2.0 / (2.0 - x * x - y * y) ** 2


def _circular_exact(x, y):
    excess = np.maximum(np.hypot(x - 0.5, y - 0.5) - 0.2, 0.0)
    return 0.5 * excess * excess


def _circular_rhs(x, y):
    # 0/0 at the disc center; the limit from inside the disc (and the value
    # on the whole closed disc) is 0, so divide only where r > 0.2.
    r = np.hypot(x - 0.5, y - 0.5)
    excess = np.maximum(r - 0.2, 0.0)
    return np.where(excess > 0.0, excess / np.where(excess > 0.0, r, 1.0), 0.0)


def _abs_x(x, y):
    return np.abs(x) + 0.0 * y


def _zero(x, y):
    return 0.0 * x + 0.0 * y


def _one(x, y):
    return 1.0 + 0.0 * x + 0.0 * y


def _reject_unknown(name: str, params: dict, allowed: tuple[str, ...] = ()) -> None:
    unknown = set(params) - set(allowed)
    if unknown:
        raise ValueError(f"problem '{name}' does not accept parameters {sorted(unknown)}")


def _build_standard(params: dict) -> ProblemSpec:
    _reject_unknown("standard", params)
    return ProblemSpec("standard", -1.0, 1.0, -1.0, 1.0, _standard_rhs, _standard_exact, _standard_exact)


def _build_reg_degenerate(params: dict, name: str = "reg_degenerate", epsilon: float | None = None) -> ProblemSpec:
    if epsilon is None:
        _reject_unknown(name, params, ("epsilon",))
        epsilon = float(params.get("epsilon", 0.1))
    else:
        _reject_unknown(name, params)
    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")

    def exact(x, y, eps=epsilon):
        return 0.5 * (x - 0.5) ** 4 + eps * x * x + y * y

    def rhs(x, y, eps=epsilon):
        return 12.0 * (x - 0.5) ** 2 + 4.0 * eps + 0.0 * y

    return ProblemSpec(name, -1.0, 1.0, -1.0, 1.0, rhs, exact, exact, {"epsilon": epsilon})


def _build_trigonometric(params: dict) -> ProblemSpec:
    _reject_unknown("trigonometric", params)
    return ProblemSpec("trigonometric", 0.0, 1.0, 0.0, 1.0, _trig_rhs, _trig_exact, _trig_exact)


def _build_degenerate(params: dict) -> ProblemSpec:
    return _build_reg_degenerate(params, name="degenerate", epsilon=0.0)


def _build_constant_ma(params: dict) -> ProblemSpec:
    _reject_unknown("constant_ma", params)
    return ProblemSpec("constant_ma", -1.0, 1.0, -1.0, 1.0, _one, _one, None)


def _build_circular(params: dict) -> ProblemSpec:
    # The solution geometry (disc about (0.5, 0.5)) fits the unit square;
    # the bounds stay overridable for experiments on other rectangles.
    _reject_unknown("circular", params, ("x_min", "x_max", "y_min", "y_max"))
    x0 = float(params.get("x_min", 0.0))
    x1 = float(params.get("x_max", 1.0))
    y0 = float(params.get("y_min", 0.0))
    y1 = float(params.get("y_max", 1.0))
    if not (x1 > x0 and y1 > y0):
        raise ValueError("circular domain bounds must be ordered")
    recorded = {k: float(v) for k, v in params.items()}
    return ProblemSpec("circular", x0, x1, y0, y1, _circular_rhs, _circular_exact, _circular_exact, recorded)


def _build_unbounded(params: dict) -> ProblemSpec:
    _reject_unknown("unbounded", params)
    return ProblemSpec("unbounded", 0.0, 1.0, 0.0, 1.0, _unbounded_rhs, _unbounded_exact, _unbounded_exact)


def _build_unbounded_trimmed(params: dict) -> ProblemSpec:
    _reject_unknown("unbounded_trimmed", params)
    return ProblemSpec(
        "unbounded_trimmed", 0.0, 0.99, 0.0, 0.99, _unbounded_rhs, _unbounded_exact, _unbounded_exact
    )


def _build_abs_x(params: dict) -> ProblemSpec:
    # No numerical method in this package is expected to recover |x| (the
    # right-hand side vanishes identically); the exact solution is kept for
    # error reporting.
    _reject_unknown("abs_x", params)
    return ProblemSpec("abs_x", -1.0, 1.0, -1.0, 1.0, _zero, _abs_x, _abs_x)


_BUILDERS = {
    "standard": _build_standard,
    "reg_degenerate": _build_reg_degenerate,
    "trigonometric": _build_trigonometric,
    "degenerate": _build_degenerate,
    "constant_ma": _build_constant_ma,
    "circular": _build_circular,
    "unbounded": _build_unbounded,
    "unbounded_trimmed": _build_unbounded_trimmed,
    "abs_x": _build_abs_x,
}

PROBLEM_NAMES = tuple(_BUILDERS)


def catalog(name: str, **params: float) -> ProblemSpec:
    """Look up a problem by name, applying parameter overrides.

    Raises :class:`UnknownProblemError` for names outside
    :data:`PROBLEM_NAMES` and ``ValueError`` for invalid or unsupported
    parameters.
    """
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownProblemError(
            f"unknown problem '{name}'; choose one of {', '.join(PROBLEM_NAMES)}"
        ) from None
    return builder(dict(params))


def verify_consistency(spec: ProblemSpec, grid: GridSpec) -> float:
    """Sup over interior nodes of |det(D^2 u_exact) - f| on the given grid.

    A regression guard: for smooth exact solutions this is O(h^2), and for
    polynomial solutions of degree <= 4 it reduces to the explicit stencil
    bias.  Requires an exact solution.
    """
    if spec.exact is None:
        raise NoExactSolutionError(f"problem '{spec.name}' has no exact solution")
    mad = ma_determinant(sample(grid, spec.exact))
    f_int = sample_interior(grid, spec.rhs)
    return float(np.abs(mad.interior - f_int).max())
