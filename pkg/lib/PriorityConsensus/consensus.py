"""
Priority consensus: every agent repeatedly pulls its priority vector toward
its neighbours' vectors with gain c, which drives all vectors to the average
of the initial ones.

Priority tables are (m, m) arrays; row i is agent i's priority vector and
entry (i, j) is agent i's priority for objective j.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import GainRangeError, ShapeError, SimplexError

logger = logging.getLogger(__name__)

DEFAULT_GAIN_FRACTION = 0.9
SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class PriorityState:
    w: np.ndarray
    c: float

    @property
    def m(self):
        return self.w.shape[0]

    @property
    def min_entry(self):
        return float(self.w.min())


def validate_priorities(w):
    """Check that every row is a strictly positive probability vector.

    Entries must lie in (0, 1); a single agent may hold the trivial table [[1]].
    Returns the table as a float array.
    """
    w = np.array(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ShapeError(f"Priority table must be m x m, got shape {w.shape}")
    m = w.shape[0]
    for i, row in enumerate(w):
        if not np.all(np.isfinite(row)):
            raise SimplexError(f"Agent {i + 1} priorities contain non-finite values")
        if np.any(row <= 0) or (m > 1 and np.any(row >= 1)):
            raise SimplexError(f"Agent {i + 1} priorities must lie strictly in (0, 1), got {row.tolist()}")
        if abs(row.sum() - 1.0) > SIMPLEX_TOL:
            raise SimplexError(f"Agent {i + 1} priorities sum to {row.sum():.12g}, expected 1")
    return w


def gain_limit(g):
    """Upper end of the admissible gain interval, inf for a single agent."""
    return np.inf if g.max_degree == 0 else 1.0 / g.max_degree


def resolve_gain(c, g):
    """Turn a configured gain ("auto"/None or a number) into a checked float."""
    if c is None or c == "auto":
        if g.max_degree == 0:
            return DEFAULT_GAIN_FRACTION
        return DEFAULT_GAIN_FRACTION / g.max_degree
    c = float(c)
    limit = gain_limit(g)
    if not 0 < c < limit:
        raise GainRangeError(f"Consensus gain c={c} must satisfy 0 < c < 1/max_degree = {limit:.6g}")
    return c


def make_priority_state(w, g, c=None):
    w = validate_priorities(w)
    if w.shape[0] != g.m:
        raise ShapeError(f"Priority table has {w.shape[0]} agents, graph has {g.m}")
    return PriorityState(w=w, c=resolve_gain(c, g))


def consensus_matrix(g, c):
    """P = I - cL."""
    return np.eye(g.m) - c * g.laplacian


def priority_step(state, g):
    """One update w^i <- w^i + c * sum_j h_ij (w^j - w^i) for every agent."""
    if not 0 < state.c < gain_limit(g):
        raise GainRangeError(f"Consensus gain c={state.c} outside (0, {gain_limit(g):.6g})")
    w = state.w
    pulled = g.adjacency @ w - g.degree[:, None] * w
    return PriorityState(w=w + state.c * pulled, c=state.c)


def priority_step_matrix(state, g):
    """Network form of priority_step: W(k+1) = P W(k) with agents along rows."""
    return PriorityState(w=consensus_matrix(g, state.c) @ state.w, c=state.c)


def average_priorities(w0):
    """Consensus limit: the arithmetic mean of the initial priority vectors."""
    w0 = validate_priorities(getattr(w0, "w", w0))
    return w0.mean(axis=0)


def random_priorities(m, seed, min_weight=0.05):
    """Random priority table; uniforms floored at min_weight, then normalized per agent."""
    if m == 1:
        return np.ones((1, 1))
    if not 0 < min_weight < 1:
        raise SimplexError(f"min_weight must lie in (0, 1), got {min_weight}")
    rng = np.random.default_rng(seed)
    raw = np.maximum(rng.uniform(0.0, 1.0, size=(m, m)), min_weight)
    return raw / raw.sum(axis=1, keepdims=True)


def run_consensus(state, g, tol=1e-12, max_steps=100000):
    """Iterate priority_step until every agent is within tol of the average."""
    target = state.w.mean(axis=0)
    for step in range(max_steps):
        if np.max(np.abs(state.w - target)) <= tol:
            logger.debug(f"Priority consensus reached after {step} steps")
            return state
        state = priority_step(state, g)
    logger.warning(f"Priority consensus not within {tol} after {max_steps} steps")
    return state
