"""
Random convex quadratic objectives f_i(x) = 1/2 x'Q_i x + r_i'x + c_i,
gradient bounds over the box, and the centralized weighted-optimum oracle.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .box import project_box
from .errors import NumericError, ShapeError, SimplexError

logger = logging.getLogger(__name__)

ORACLE_TOL = 1e-10
ORACLE_MAX_ITER = 1000000


@dataclass(frozen=True)
class QuadraticProblem:
    q_mat: np.ndarray
    r_vec: np.ndarray
    c_scalar: float

    @property
    def n(self):
        return self.r_vec.shape[0]


@dataclass(frozen=True)
class OracleSolution:
    x_star: np.ndarray
    f_star: float
    method: str = "closed-form"


@dataclass(frozen=True)
class ProblemStack:
    """All agents' objectives stacked for vectorized evaluation."""
    q: np.ndarray   # (m, n, n)
    r: np.ndarray   # (m, n)
    c: np.ndarray   # (m,)

    @classmethod
    def from_problems(cls, problems):
        problems = list(problems)
        dims = {p.n for p in problems}
        if len(dims) != 1:
            raise ShapeError(f"Problems have mixed dimensions {sorted(dims)}")
        return cls(
            q=np.stack([p.q_mat for p in problems]),
            r=np.stack([p.r_vec for p in problems]),
            c=np.array([p.c_scalar for p in problems], dtype=float),
        )

    @property
    def m(self):
        return self.q.shape[0]

    @property
    def n(self):
        return self.q.shape[1]

    def problems(self):
        return [QuadraticProblem(self.q[i], self.r[i], float(self.c[i])) for i in range(self.m)]

    def gradients(self, x):
        """Row i is grad f_i evaluated at row i of x."""
        return np.einsum("ijk,ik->ij", self.q, x) + self.r

    def values(self, x):
        """Row-wise f_i(x^i)."""
        return 0.5 * np.einsum("ij,ijk,ik->i", x, self.q, x) + np.einsum("ij,ij->i", self.r, x) + self.c

    def values_at(self, x):
        """Every f_i evaluated at the single point x."""
        return 0.5 * np.einsum("j,ijk,k->i", x, self.q, x) + self.r @ x + self.c


def generate_quadratic(seed, n, shift=0.1, r_scale=10.0, c_scale=10.0):
    """Deterministic SPD quadratic: Q = G'G + shift*I with G ~ U[-1,1]."""
    if n < 1:
        raise ShapeError(f"Dimension n must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    g = rng.uniform(-1.0, 1.0, size=(n, n))
    q = g.T @ g + shift * np.eye(n)
    q = 0.5 * (q + q.T)
    r = rng.uniform(-r_scale, r_scale, size=n)
    c = float(rng.uniform(-c_scale, c_scale))
    return QuadraticProblem(q_mat=q, r_vec=r, c_scalar=c)


def generate_problem_set(seed, m, n, shift=0.1, r_scale=10.0, c_scale=10.0):
    """One problem per agent, each from its own seed spawned off the run seed."""
    agent_seeds = np.random.SeedSequence(seed).generate_state(m)
    return [generate_quadratic(int(s), n, shift=shift, r_scale=r_scale, c_scale=c_scale)
            for s in agent_seeds]


def eval_and_grad(p, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (p.n,):
        raise ShapeError(f"Point has shape {x.shape}, problem dimension is {p.n}")
    qx = p.q_mat @ x
    return float(0.5 * x @ qx + p.r_vec @ x + p.c_scalar), qx + p.r_vec


def _stack(problems):
    return problems if isinstance(problems, ProblemStack) else ProblemStack.from_problems(problems)


def weighted_value(problems, wbar, x):
    return float(np.asarray(wbar) @ _stack(problems).values_at(np.asarray(x, dtype=float)))


def relative_gap(value, f_star):
    """|value - f*| / |f*|, or the absolute gap when f* is zero."""
    if f_star == 0:
        return abs(value - f_star)
    return abs(value - f_star) / abs(f_star)


def weighted_optimum(problems, wbar, box):
    """Minimize sum_i wbar_i f_i over the box.

    Uses the closed form when the unconstrained minimizer is interior and a
    projected gradient solve otherwise.
    """
    stack = _stack(problems)
    wbar = np.asarray(wbar, dtype=float)
    if wbar.shape != (stack.m,):
        raise ShapeError(f"Weight vector has shape {wbar.shape}, expected ({stack.m},)")
    if np.any(wbar <= 0) or abs(wbar.sum() - 1.0) > 1e-9:
        raise SimplexError(f"Oracle weights must be positive and sum to 1, got {wbar.tolist()}")

    hessian = np.einsum("i,ijk->jk", wbar, stack.q)
    linear = wbar @ stack.r
    cond = np.linalg.cond(hessian)
    if not np.isfinite(cond) or cond * np.finfo(float).eps >= 1.0:
        raise NumericError(f"Weighted Hessian is numerically singular (condition number {cond:.3g})")

    try:
        x_u = linalg.cho_solve(linalg.cho_factor(hessian), -linear)
    except linalg.LinAlgError as e:
        raise NumericError(f"Weighted Hessian is not positive definite: {e}")

    if box.contains(x_u):
        x_star, method = x_u, "closed-form"
    else:
        logger.info("Unconstrained optimum leaves the box, falling back to projected gradient")
        x_star, method = _projected_gradient(hessian, linear, box, project_box(x_u, box)), "projected-gradient"

    return OracleSolution(x_star=x_star, f_star=weighted_value(stack, wbar, x_star), method=method)


def _projected_gradient(hessian, linear, box, x0):
    step = 1.0 / linalg.eigvalsh(hessian)[-1]
    x = x0
    for it in range(ORACLE_MAX_ITER):
        x_next = project_box(x - step * (hessian @ x + linear), box)
        if np.linalg.norm(x_next - x) < ORACLE_TOL:
            logger.debug(f"Projected gradient oracle converged in {it + 1} iterations")
            return x_next
        x = x_next
    raise NumericError(f"Projected gradient oracle did not converge in {ORACLE_MAX_ITER} iterations")


def gradient_bound(problems, box):
    """L = max_i ||Q_i||_F * b * sqrt(n) + ||r_i||, an upper bound on ||grad f_i|| over the box."""
    stack = _stack(problems)
    b = box.radius
    q_norms = np.linalg.norm(stack.q, ord="fro", axis=(1, 2))
    r_norms = np.linalg.norm(stack.r, axis=1)
    return float(np.max(q_norms * b * np.sqrt(stack.n) + r_norms))


def save_problems(path, problems):
    """Flat dump: header 'm n', then per agent row-major Q, r, c, one number per line."""
    stack = _stack(problems)
    flat = np.concatenate([
        np.concatenate([stack.q[i].ravel(), stack.r[i], [stack.c[i]]]) for i in range(stack.m)
    ])
    np.savetxt(path, flat, fmt="%.17g", header=f"{stack.m} {stack.n}")
    logger.info(f"Wrote {stack.m} problem(s) of dimension {stack.n} to {path}")


def load_problems(path):
    with open(path) as f:
        header = f.readline().lstrip("#").split()
    m, n = int(header[0]), int(header[1])
    flat = np.loadtxt(path, ndmin=1)
    block = n * n + n + 1
    if flat.shape[0] != m * block:
        raise ShapeError(f"{path}: expected {m * block} numbers for m={m}, n={n}, found {flat.shape[0]}")
    problems = []
    for i in range(m):
        chunk = flat[i * block:(i + 1) * block]
        problems.append(QuadraticProblem(
            q_mat=chunk[:n * n].reshape(n, n),
            r_vec=chunk[n * n:n * n + n].copy(),
            c_scalar=float(chunk[-1]),
        ))
    return problems
