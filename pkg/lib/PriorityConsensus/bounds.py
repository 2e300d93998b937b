"""
Closed-form convergence-rate bounds: disagreement from the iterate average
and squared distance to the weighted optimum, for alpha_k = alpha0 / k.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import DomainError
from .mixing import geometric_params

logger = logging.getLogger(__name__)

BOUNDS_COLUMNS = ["k", "disagreement", "disagreement_bound", "sum_sq_dist_to_opt", "optimality_bound"]


@dataclass(frozen=True)
class BoundParams:
    m: int
    eta: float
    B0: int
    C: float
    beta: float
    M: float
    L: float
    alpha0: float
    epsilon: float
    K: int
    omega_max: float

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise DomainError(f"beta={self.beta} must lie in (0, 1)")

    @property
    def window_start(self):
        """First iteration at which the bounds apply, K + 3."""
        return self.K + 3

    def alpha(self, k):
        return self.alpha0 / k


def first_small_step(alpha0, epsilon):
    """Smallest k >= 1 with alpha0 / k <= epsilon."""
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    k = max(1, math.ceil(alpha0 / epsilon))
    while k > 1 and alpha0 / (k - 1) <= epsilon:
        k -= 1
    while alpha0 / k > epsilon:
        k += 1
    return k


def bound_params(w0, M, L, alpha0, epsilon):
    """Assemble BoundParams from the initial priority table and run constants."""
    w0 = np.asarray(getattr(w0, "w", w0))
    m = w0.shape[0]
    geo = geometric_params(w0, m)
    return BoundParams(
        m=m, eta=geo.eta, B0=geo.B0, C=geo.C, beta=geo.beta, M=float(M), L=float(L),
        alpha0=float(alpha0), epsilon=float(epsilon), K=first_small_step(alpha0, epsilon),
        omega_max=1.0 - geo.eta,
    )


def disagreement_bound(k, p):
    """Upper bound on ||x^i(k) - y(k)||, valid for k >= K + 3."""
    if k < p.window_start:
        raise DomainError(f"Disagreement bound holds for k >= K+3 = {p.window_start}, got k={k}")
    scale = p.m * p.C
    return (
        2 * scale * p.M * p.beta ** (k - 1)
        + 4 * scale * p.L * p.alpha0 * p.beta ** (k - p.K) / (1 - p.beta)
        + 4 * p.alpha(k - 1) * p.L
        + 4 * scale * p.L * p.alpha0 * p.epsilon / (1 - p.beta)
    )


def _bracket(r, p):
    """Per-step term multiplying omega^(k+1-r) alpha_r L in the optimality bound."""
    scale = p.m * p.C
    return p.alpha(r) * p.L * (
        p.alpha(r) * p.L
        + 4 * scale * p.M * p.beta ** (r - 1)
        + 8 * scale * p.L * p.alpha0 * (p.beta ** (r - p.K) / (1 - p.beta) + p.epsilon / (1 - p.beta))
        + 8 * p.alpha(r - 1) * p.L
    )


def _check_window(k, s, p):
    if s < p.window_start:
        raise DomainError(f"Optimality bound needs s >= K+3 = {p.window_start}, got s={s}")
    if k < s:
        raise DomainError(f"Optimality bound needs k >= s, got k={k}, s={s}")


def optimality_bound(k, s, g, distances_at_s, p):
    """Upper bound on sum_i ||x^i(k+1) - x*||^2 given ||x^j(s) - x*||^2 for every agent."""
    _check_window(k, s, p)
    distances_at_s = np.asarray(distances_at_s, dtype=float)
    q_sum = float(g.q_matrix.sum())
    start = float(g.q_matrix.sum(axis=0) @ distances_at_s) * p.omega_max ** (k + 1)
    r = np.arange(s, k + 1)
    tail = q_sum * np.sum(p.omega_max ** (k + 1 - r) * _bracket(r.astype(float), p))
    return float(start + tail)


def optimality_bound_series(ks, s, g, distances_at_s, p):
    """optimality_bound for every k in ks (ascending) using a running sum."""
    ks = list(ks)
    if not ks:
        return np.array([])
    _check_window(ks[0], s, p)
    distances_at_s = np.asarray(distances_at_s, dtype=float)
    q_sum = float(g.q_matrix.sum())
    weighted_start = float(g.q_matrix.sum(axis=0) @ distances_at_s)
    out = np.empty(len(ks))
    running, k_done = 0.0, s - 1
    for idx, k in enumerate(ks):
        if k < k_done:
            raise DomainError("optimality_bound_series expects ascending iterations")
        for r in range(k_done + 1, k + 1):
            running = p.omega_max * (running + _bracket(float(r), p))
        k_done = k
        out[idx] = weighted_start * p.omega_max ** (k + 1) + q_sum * running
    return out


def bounds_table(trace, g, p):
    """Bound-versus-measurement rows for every recorded k >= K + 3.

    The optimality bound at k is compared with the squared distance measured
    at k + 1, i.e. record k' is paired with optimality_bound(k' - 1, s).
    """
    s = p.window_start
    try:
        at_s = trace.record_at(s)
    except KeyError:
        logger.warning(f"Trace has no record at s = {s}, bounds table is empty")
        return pd.DataFrame(columns=BOUNDS_COLUMNS)
    rows = [rec for rec in trace.records if rec.k >= s]
    opt_rows = [rec for rec in rows if rec.k - 1 >= s]
    opt = dict(zip(
        [rec.k for rec in opt_rows],
        optimality_bound_series([rec.k - 1 for rec in opt_rows], s, g, at_s.agent_sq_dist, p),
    ))
    table = pd.DataFrame({
        "k": [rec.k for rec in rows],
        "disagreement": [rec.disagreement for rec in rows],
        "disagreement_bound": [disagreement_bound(rec.k, p) for rec in rows],
        "sum_sq_dist_to_opt": [rec.sum_sq_dist_to_opt for rec in rows],
        "optimality_bound": [opt.get(rec.k, np.nan) for rec in rows],
    })
    logger.info(f"Evaluated bounds on {len(table)} recorded iterations from s = {s}")
    return table
