"""Convergence sweeps over ``h`` and order estimation on the resulting tables."""

from __future__ import annotations

import csv
import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from gfdmlab.common.enums import Method, ReconstructionScheme
from gfdmlab.common.exceptions import GfdmError, ParameterError
from gfdmlab.common.logging import get_logger
from gfdmlab.config import settings
from gfdmlab.core.benchmark.cases import define_test_case
from gfdmlab.core.benchmark.schemas import RESULTS_HEADER, ConvergenceRow, OrderEstimate
from gfdmlab.core.benchmark.service import solve_case
from gfdmlab.core.pointcloud.io import format_float

logger = get_logger("benchmark.convergence")

Job = tuple[int, Method, ReconstructionScheme, float, int, bool | None, bool]


def _check_h_list(h_list: Sequence[float]) -> list[float]:
    values = [float(h) for h in h_list]
    if not values:
        raise ParameterError("h_list must not be empty")
    if any(h <= 0.0 for h in values):
        raise ParameterError(f"h values must be positive, got {values}")
    if any(b >= a for a, b in zip(values, values[1:])):
        raise ParameterError(f"h_list must be strictly decreasing, got {values}")
    return values


def _run_job(job: Job) -> ConvergenceRow:
    case_id, method, scheme, h, seed, dd, analytic = job
    try:
        solution = solve_case(case_id, method, scheme, h, seed, dd, analytic)
    except (GfdmError, np.linalg.LinAlgError) as exc:
        logger.warning(
            "Sweep entry failed | case=%d | method=%s | h=%.4g | error=%s",
            case_id,
            method.value,
            h,
            exc,
        )
        return ConvergenceRow(
            case=case_id, method=method, scheme=scheme, seed=seed, h=h, failure=str(exc)
        )
    return ConvergenceRow.from_summary(solution.summary)


def _running_orders(rows: list[ConvergenceRow]) -> list[ConvergenceRow]:
    """Fill ``order_running`` against the previous row of the same method and scheme."""
    previous: dict[tuple[Method, ReconstructionScheme], ConvergenceRow] = {}
    result = []
    for row in rows:
        key = (row.method, row.scheme)
        prior = previous.get(key)
        order = None
        if (
            prior is not None
            and prior.is_valid
            and row.is_valid
            and prior.n_points != row.n_points
        ):
            h_prior, h_row = prior.n_points**-0.5, row.n_points**-0.5
            order = math.log(prior.error / row.error) / math.log(h_prior / h_row)
        result.append(row.model_copy(update={"order_running": order}))
        previous[key] = row
    return result


def run_convergence(
    case_id: int,
    methods: Iterable[Method | str],
    scheme: ReconstructionScheme | str,
    h_list: Sequence[float] | None = None,
    seed: int | None = None,
    dd_correction: bool | None = None,
    analytic_gradients: bool = False,
    workers: int | None = None,
) -> list[ConvergenceRow]:
    """Sweep every method over ``h_list`` for one case.

    Rows come back ordered by ``h`` (as given) and then by method, whatever
    order the jobs complete in. A failing stage yields a row with
    ``error = nan`` and the sweep carries on.
    """
    define_test_case(case_id)
    methods = [Method(m) for m in methods]
    if not methods:
        raise ParameterError("At least one method is required")
    scheme = ReconstructionScheme(scheme)
    h_values = _check_h_list(settings.DEFAULT_H_LIST if h_list is None else h_list)
    seed = settings.DEFAULT_SEED if seed is None else seed
    n_workers = settings.WORKERS if workers is None else workers

    jobs: list[Job] = [
        (case_id, method, scheme, h, seed, dd_correction, analytic_gradients)
        for h in h_values
        for method in methods
    ]
    logger.info(
        "Convergence sweep started | case=%d | methods=%s | scheme=%s | levels=%d | workers=%d",
        case_id,
        ",".join(m.value for m in methods),
        scheme.value,
        len(h_values),
        n_workers,
    )
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            rows = list(pool.map(_run_job, jobs))
    else:
        rows = [_run_job(job) for job in jobs]

    rows = _running_orders(rows)
    failed = sum(1 for row in rows if not row.is_valid)
    logger.info("Convergence sweep finished | rows=%d | failed=%d", len(rows), failed)
    return rows


def estimate_order(rows: Sequence[ConvergenceRow]) -> OrderEstimate:
    """Least-squares slope of ``log(error)`` against ``log(N^-1/2)``.

    ``fit_residual`` is the root-mean-square deviation of the log errors from
    the fitted line.
    """
    if not rows:
        raise ParameterError("No rows to estimate an order from")
    method, scheme = rows[0].method, rows[0].scheme
    valid = [row for row in rows if row.is_valid]
    if len({row.n_points for row in valid}) < 2:
        return OrderEstimate(
            method=method,
            scheme=scheme,
            valid_rows=len(valid),
            note="fewer than two valid refinement levels",
        )

    log_h = np.log(np.array([row.n_points for row in valid], dtype=float) ** -0.5)
    log_e = np.log(np.array([row.error for row in valid]))
    slope, intercept = np.polyfit(log_h, log_e, 1)
    residual = log_e - (slope * log_h + intercept)
    return OrderEstimate(
        method=method,
        scheme=scheme,
        valid_rows=len(valid),
        order=float(slope),
        intercept=float(intercept),
        fit_residual=float(np.sqrt(np.mean(residual**2))),
    )


def estimate_orders(rows: Sequence[ConvergenceRow]) -> list[OrderEstimate]:
    """One estimate per ``(method, scheme)`` in first-seen order."""
    groups: dict[tuple[Method, ReconstructionScheme], list[ConvergenceRow]] = {}
    for row in rows:
        groups.setdefault((row.method, row.scheme), []).append(row)
    return [estimate_order(group) for group in groups.values()]


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------


def _optional(value: float | None) -> str:
    return "" if value is None else format_float(value)


def results_record(row: ConvergenceRow) -> list[str]:
    return [
        str(row.case),
        row.method.value,
        row.scheme.value,
        str(row.seed),
        format_float(row.h),
        str(row.n_points),
        _optional(row.dt),
        format_float(row.error),
        _optional(row.order_running),
        f"{row.wall_time_s:.3f}",
        str(row.clamp_count),
        str(row.dd_violations),
    ]


def write_results(rows: Iterable[ConvergenceRow], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULTS_HEADER)
        for row in rows:
            writer.writerow(results_record(row))
