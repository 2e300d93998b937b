"""
Priority-driven mixing matrices A(k), transition products and the constants
of their geometric convergence.

A is stored agent-major: row i holds the weights agent i applies to the
iterates of agents 0..m-1, so each row sums to 1 while columns need not.
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple

import numpy as np
from scipy import linalg

from .errors import DomainError, ShapeError, VacuousBoundError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MixingMatrix:
    a: np.ndarray

    def mix(self, x):
        """v^i = sum_j a_ij x^j for a stack of row iterates x."""
        return self.a @ x


@dataclass(frozen=True)
class TransitionProduct:
    """phi = A(k) A(k-1) ... A(s)."""
    phi: np.ndarray
    k: int
    s: int


class GeometricParams(NamedTuple):
    C: float
    beta: float
    B0: int
    eta: float


def _table(w):
    return np.asarray(getattr(w, "w", w), dtype=float)


def build_mixing_matrix(w, g):
    """Keep neighbour and self priorities; fold non-neighbour priorities into the diagonal."""
    w = _table(w)
    if w.shape != (g.m, g.m):
        raise ShapeError(f"Priority table shape {w.shape} does not match {g.m} agents")
    a = w * g.adjacency
    folded = np.diagonal(w) + (w * g.q_tilde).sum(axis=1)
    np.fill_diagonal(a, folded)
    return MixingMatrix(a=a)


def build_mixing_matrix_hadamard(w, g):
    """Network form Q∘W + diag((W∘Q̃)1), used to cross-check build_mixing_matrix."""
    w = _table(w)
    ones = np.ones((g.m, g.m))
    return MixingMatrix(a=g.q_matrix * w + ((w * g.q_tilde) @ ones) * np.eye(g.m))


def transition_product(mats, s=0):
    """Ordered product of mixing matrices given oldest first: [A(s), ..., A(k)]."""
    if not mats:
        raise ShapeError("transition_product needs at least one matrix")
    arrays = [np.asarray(getattr(mat, "a", mat), dtype=float) for mat in mats]
    shape = arrays[0].shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ShapeError(f"Mixing matrices must be square, got {shape}")
    for idx, arr in enumerate(arrays):
        if arr.shape != shape:
            raise ShapeError(f"Matrix {idx} has shape {arr.shape}, expected {shape}")
    phi = reduce(lambda acc, a: a @ acc, arrays[1:], arrays[0])
    return TransitionProduct(phi=phi, k=s + len(arrays) - 1, s=s)


def geometric_params(w0, m):
    """Constants (C, beta, B0, eta) of the geometric convergence of transition products."""
    eta = float(_table(w0).min())
    if not 0 < eta < 1:
        raise DomainError(f"Minimum initial priority eta={eta} must lie in (0, 1)")
    b0 = m - 1
    if b0 < 1:
        raise DomainError("Geometric constants need at least two agents")
    eta_b = eta ** b0
    beta = float(np.exp(np.log1p(-eta_b) / b0))
    if beta >= 1.0:
        raise VacuousBoundError(f"beta rounds to 1 for eta={eta:.4g} and {m} agents (eta^(m-1)={eta_b:.3g})")
    C = 2 * (1 + eta ** -b0) / (1 - eta_b)
    return GeometricParams(C=C, beta=beta, B0=b0, eta=eta)


def phi_spread(phi):
    """Largest column spread of a transition product, its distance to rank one."""
    phi = np.asarray(getattr(phi, "phi", phi))
    return float(np.max(phi.max(axis=0) - phi.min(axis=0)))


def stationary_weights(a):
    """Left Perron vector pi of a per-agent stochastic matrix (pi A = pi, sum pi = 1)."""
    a = np.asarray(getattr(a, "a", a), dtype=float)
    values, vectors = linalg.eig(a.T)
    idx = int(np.argmin(np.abs(values - 1.0)))
    pi = np.real(vectors[:, idx])
    pi = np.clip(pi / pi.sum(), 0.0, None)
    return pi / pi.sum()
