"""Study runner: single solves, size sweeps, CSV/JSON emission, slope fits.

Runs are sequential and single-process so wall times stay comparable; only
iteration counts and fitted slopes are meaningful across machines.  All
non-timing outputs are deterministic: re-running a study with the same
configuration reproduces them bit-exactly.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
from typing import Callable, Iterable, Sequence

import numpy as np

from .bellman_solver import SolveReport, SolverConfig, bellman_solve
from .grid import GridSpec, ScalarField, build_grid, sample
from .metrics import error_summary, order_fit
from .problems import ProblemSpec, catalog
from .reference_methods import M1Config, M2Config, m1_solve, m2_solve

logger = logging.getLogger(__name__)

METHODS = ("bellman", "m1", "m2")

#: Largest mesh the Gauss-Seidel method joins by default in studies; its
#: sweep counts grow superlinearly with N, so bigger sizes need an explicit
#: opt-in.
M1_DEFAULT_SIZE_CAP = 63

CSV_COLUMNS = (
    "problem",
    "method",
    "n",
    "iterations",
    "converged",
    "wall_time_seconds",
    "sup_error",
    "l2_error",
    "l2_error_raw",
    "marked_final",
    "min_value",
)


@dataclasses.dataclass
class StudyRecord:
    """One (problem, method, mesh size) outcome, as tabulated in studies."""

    problem: str
    method: str
    n: int
    iterations: int
    converged: bool
    wall_time_seconds: float
    sup_error: float | None
    l2_error: float | None
    l2_error_raw: float | None
    marked_final: int | None
    min_value: float


@dataclasses.dataclass
class StudyConfig:
    """A study: one problem, a method set, a mesh-size sweep, overrides."""

    problem: str
    methods: Sequence[str]
    sizes: Sequence[int]
    params: dict = dataclasses.field(default_factory=dict)
    tolerance: float | None = None
    max_iterations: int | None = None
    det_floor: float | None = None
    interpolation: bool = True
    m1_root: str = "smaller"
    m2_clamp: bool = True
    timing_repetitions: int = 1
    allow_large_m1: bool = False
    csv_path: str | None = None
    json_path: str | None = None

    def validate(self) -> None:
        if not self.methods:
            raise ValueError("study needs at least one method")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if not self.sizes:
            raise ValueError("study needs at least one mesh size")
        if any(n < 3 for n in self.sizes):
            raise ValueError("mesh sizes must be at least 3")
        if self.timing_repetitions < 1:
            raise ValueError("timing_repetitions must be at least 1")


def _solver_for(
    method: str,
    tolerance: float | None,
    max_iterations: int | None,
    det_floor: float | None,
    interpolation: bool,
    m1_root: str,
    m2_clamp: bool,
) -> Callable[[ProblemSpec, GridSpec], SolveReport]:
    common = {}
    if tolerance is not None:
        common["tolerance"] = tolerance
    if max_iterations is not None:
        common["max_iterations"] = max_iterations
    if method == "bellman":
        extra = {} if det_floor is None else {"det_floor": det_floor}
        config = SolverConfig(interpolation_enabled=interpolation, **common, **extra)
        return lambda spec, grid: bellman_solve(spec, grid, config)
    if method == "m1":
        config = M1Config(root_selection=m1_root, **common)
        return lambda spec, grid: m1_solve(spec, grid, config)
    if method == "m2":
        config = M2Config(radicand_clamp=m2_clamp, **common)
        return lambda spec, grid: m2_solve(spec, grid, config)
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def run_solve(
    problem: str,
    method: str,
    n: int,
    params: dict | None = None,
    *,
    tolerance: float | None = None,
    max_iterations: int | None = None,
    det_floor: float | None = None,
    interpolation: bool = True,
    m1_root: str = "smaller",
    m2_clamp: bool = True,
    timing_repetitions: int = 1,
) -> tuple[StudyRecord, dict]:
    """Solve one (problem, method, N) combination.

    Returns the study record plus a JSON-ready payload holding the grid,
    the per-iteration diagnostics and the full solution (row-major).  The
    recorded wall time covers the solver call only; with
    ``timing_repetitions > 1`` the solve is repeated and the minimum time
    kept (all other outputs are identical by determinism).
    """
    spec = catalog(problem, **(params or {}))
    grid = build_grid(*spec.domain, n)
    solver = _solver_for(
        method, tolerance, max_iterations, det_floor, interpolation, m1_root, m2_clamp
    )
    report = solver(spec, grid)
    wall = report.wall_time_seconds
    for _ in range(timing_repetitions - 1):
        wall = min(wall, solver(spec, grid).wall_time_seconds)

    errors = None
    if spec.exact is not None:
        errors = error_summary(report.final, sample(grid, spec.exact))
    record = StudyRecord(
        problem=problem,
        method=method,
        n=n,
        iterations=report.iterations,
        converged=report.converged,
        wall_time_seconds=wall,
        sup_error=errors.sup_error if errors else None,
        l2_error=errors.l2_error if errors else None,
        l2_error_raw=errors.l2_error_raw if errors else None,
        marked_final=report.marked_counts[-1] if report.marked_counts else None,
        min_value=float(report.final.values.min()),
    )
    payload = {
        "problem": problem,
        "method": method,
        "n": n,
        "grid": {
            "bounds": [grid.x_min, grid.x_max, grid.y_min, grid.y_max],
            "n": grid.n,
        },
        "report": {
            "converged": report.converged,
            "iterations": report.iterations,
            "update_norms": report.update_norms,
            "marked_counts": report.marked_counts,
            "wall_time_seconds": wall,
        },
        "metrics": {
            "sup_error": record.sup_error,
            "l2_error": record.l2_error,
            "l2_error_raw": record.l2_error_raw,
            "marked_final": record.marked_final,
            "min_value": record.min_value,
        },
        "solution": solution_to_list(report.final),
    }
    return record, payload


def solution_to_list(field: ScalarField) -> list[float]:
    """Row-major flat list of field values (json round-trip safe)."""
    return field.values.ravel(order="C").tolist()


def solution_from_payload(payload: dict) -> ScalarField:
    """Rebuild the solution field from a solve payload, bit-exactly."""
    bounds = payload["grid"]["bounds"]
    n = payload["grid"]["n"]
    grid = build_grid(*bounds, n)
    values = np.array(payload["solution"], dtype=np.float64).reshape((n, n), order="C")
    return ScalarField(grid, values)


def run_study(config: StudyConfig) -> list[StudyRecord]:
    """Run methods x sizes sequentially, flushing outputs even on failure.

    Oversize Gauss-Seidel combinations are skipped (with a log line) unless
    ``allow_large_m1`` is set.  Solver-level non-convergence is recorded,
    not raised; genuine failures propagate after partial results are
    written.
    """
    config.validate()
    records: list[StudyRecord] = []
    try:
        for method in config.methods:
            for n in config.sizes:
                if method == "m1" and n > M1_DEFAULT_SIZE_CAP and not config.allow_large_m1:
                    logger.warning(
                        "skipping m1 at N=%d (above default cap %d; "
                        "set allow_large_m1 to include it)",
                        n,
                        M1_DEFAULT_SIZE_CAP,
                    )
                    continue
                record, _ = run_solve(
                    config.problem,
                    method,
                    n,
                    config.params,
                    tolerance=config.tolerance,
                    max_iterations=config.max_iterations,
                    det_floor=config.det_floor,
                    interpolation=config.interpolation,
                    m1_root=config.m1_root,
                    m2_clamp=config.m2_clamp,
                    timing_repetitions=config.timing_repetitions,
                )
                logger.info(
                    "%s/%s N=%d: converged=%s iterations=%d time=%.3fs",
                    config.problem, method, n, record.converged,
                    record.iterations, record.wall_time_seconds,
                )
                records.append(record)
    except Exception:
        _flush_outputs(records, config)
        raise
    _flush_outputs(records, config)
    return records


def _flush_outputs(records: list[StudyRecord], config: StudyConfig) -> None:
    if config.csv_path:
        write_csv(records, config.csv_path)
    if config.json_path:
        write_json(records, config.json_path)


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(records: Iterable[StudyRecord], path: str) -> None:
    """Write records with the fixed column order, floats at 17 digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([_format_cell(getattr(r, col)) for col in CSV_COLUMNS])


def write_json(records: Iterable[StudyRecord], path: str) -> None:
    with open(path, "w") as fh:
        json.dump([dataclasses.asdict(r) for r in records], fh, indent=2)
        fh.write("\n")


def fit_report(records: Iterable[StudyRecord]) -> dict[tuple[str, str], dict[str, float]]:
    """Per (problem, method) slopes of errors and wall time against N.

    Groups with fewer than two positive data points for a column are
    skipped with a warning; a missing slope simply does not appear in that
    group's dict.
    """
    groups: dict[tuple[str, str], list[StudyRecord]] = {}
    for r in records:
        groups.setdefault((r.problem, r.method), []).append(r)
    out: dict[tuple[str, str], dict[str, float]] = {}
    for key, rows in groups.items():
        slopes: dict[str, float] = {}
        for column in ("sup_error", "l2_error", "wall_time_seconds"):
            pairs = [
                (r.n, getattr(r, column))
                for r in rows
                if getattr(r, column) is not None and getattr(r, column) > 0
            ]
            if len(pairs) < 2:
                logger.warning(
                    "skipping %s slope for %s/%s: need two positive points, have %d",
                    column, key[0], key[1], len(pairs),
                )
                continue
            slopes[column] = order_fit([p[0] for p in pairs], [p[1] for p in pairs])
        out[key] = slopes
    return out
