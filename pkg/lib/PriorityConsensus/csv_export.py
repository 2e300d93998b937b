"""
CSV writers for traces, bound tables and sweeps. Floats are written with
17 significant digits so reruns of the same config compare byte-for-byte.
"""

import logging
import os

import pandas as pd

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["k", "alpha_k", "disagreement", "sum_sq_dist_to_opt", "f_of_y", "min_W_entry"]
FLOAT_FORMAT = "%.17g"


def trace_frame(trace):
    return pd.DataFrame(
        [
            (rec.k, rec.alpha_k, rec.disagreement, rec.sum_sq_dist_to_opt, rec.f_of_y, rec.min_w_entry)
            for rec in trace.records
        ],
        columns=TRACE_COLUMNS,
    )


def sweep_frame(points):
    """One row per sweep point: run id, average priorities, objective values and gap."""
    rows = []
    for point in points:
        row = {"run_id": point.run_id}
        if point.wbar is not None:
            row.update({f"wbar_{i + 1}": v for i, v in enumerate(point.wbar)})
        if point.f_values is not None:
            row.update({f"f_{i + 1}": v for i, v in enumerate(point.f_values)})
        row["weighted_value"] = point.weighted_value
        row["oracle_f_star"] = point.oracle_f_star
        row["relative_gap"] = point.relative_gap
        rows.append(row)
    return pd.DataFrame(rows)


def write_csv(frame, path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path
