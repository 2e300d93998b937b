"""
Pareto-front exploration: rerun the algorithm from different initial
priority tables with everything else fixed, and filter objective vectors
for dominance.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .config import PrioritySpec
from .consensus import validate_priorities
from .errors import ShapeError, SweepRunError
from .optimizer import average_state, prepare_run, run_trace
from .problems import relative_gap

logger = logging.getLogger(__name__)


@dataclass
class SweepPoint:
    run_id: str
    w0: np.ndarray
    wbar: np.ndarray = None
    f_values: np.ndarray = None
    x_hat: np.ndarray = None
    weighted_value: float = None
    oracle_f_star: float = None
    relative_gap: float = None


def default_sweep_grid(points=11, low=0.05, high=0.95):
    """Two-agent priority tables whose average is (t, 1-t) for t evenly spaced in [low, high].

    The agents are pushed apart by half the distance to the simplex boundary
    so that consensus has work to do at every point.
    """
    tables = []
    for t in np.linspace(low, high, points):
        spread = min(t, 1.0 - t) / 2.0
        tables.append(np.array([
            [t + spread, 1.0 - t - spread],
            [t - spread, 1.0 - t + spread],
        ]))
    return tables


def _point_config(base, w0):
    rows = tuple(tuple(float(v) for v in row) for row in w0)
    return replace(base, priorities=PrioritySpec(kind="table", rows=rows))


def sweep(base, w0_list, workers=None):
    """One full run per initial priority table, returned in input order.

    Failed runs do not stop the sweep; they are collected and raised together
    as SweepRunError once every point has been attempted.
    """
    workers = workers or base.workers
    jobs = []
    for idx, w0 in enumerate(w0_list):
        w0 = validate_priorities(w0)
        if w0.shape[0] != base.m:
            raise ShapeError(f"Sweep table {idx} has {w0.shape[0]} agents, base config has {base.m}")
        jobs.append((f"sweep-{idx:03d}", w0, _point_config(base, w0)))
    logger.info(f"Sweeping {len(jobs)} priority tables with {workers} worker(s)")

    points, failures = [], []
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_sweep_point, run_id, w0, cfg) for run_id, w0, cfg in jobs]
            outcomes = [(job[0], job[1], future) for job, future in zip(jobs, futures)]
            for run_id, w0, future in outcomes:
                try:
                    points.append(future.result())
                except Exception as e:
                    logger.error(f"Sweep run {run_id} failed: {e}")
                    failures.append((run_id, e))
                    points.append(SweepPoint(run_id=run_id, w0=w0))
    else:
        for run_id, w0, cfg in jobs:
            try:
                points.append(_sweep_point(run_id, w0, cfg))
            except Exception as e:
                logger.error(f"Sweep run {run_id} failed: {e}")
                failures.append((run_id, e))
                points.append(SweepPoint(run_id=run_id, w0=w0))

    if failures:
        raise SweepRunError(failures, points)
    return points


def _sweep_point(run_id, w0, config):
    setup = prepare_run(config)
    trace = run_trace(config, setup)
    x_hat = average_state(trace.final_state)
    f_values = setup.problems.values_at(x_hat)
    weighted = float(setup.oracle_weights @ f_values)
    f_star = setup.oracle.f_star
    gap = relative_gap(weighted, f_star)
    logger.info(f"{run_id}: wbar={np.round(setup.wbar, 4).tolist()} gap={gap:.3e}")
    return SweepPoint(
        run_id=run_id,
        w0=w0,
        wbar=setup.wbar,
        f_values=f_values,
        x_hat=x_hat,
        weighted_value=weighted,
        oracle_f_star=f_star,
        relative_gap=gap,
    )


def pareto_filter(points, tol=0.0):
    """Non-dominated subset of objective vectors (minimization), in input order.

    q dominates p when q <= p + tol everywhere and q < p - tol somewhere.
    """
    if len(points) == 0:
        return []
    lengths = {len(p) for p in points}
    if len(lengths) != 1:
        raise ShapeError(f"Objective vectors have mixed lengths {sorted(lengths)}")
    arr = np.asarray(points, dtype=float)
    kept = []
    for i, p in enumerate(arr):
        weakly = np.all(arr <= p + tol, axis=1)
        strictly = np.any(arr < p - tol, axis=1)
        if not np.any(weakly & strictly):
            kept.append(points[i])
    return kept
