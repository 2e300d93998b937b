"""
The interlaced algorithm: priority consensus step, mixing matrix build,
state mixing, gradient step and box projection, plus the trace harness that
records the quantities the convergence bounds talk about.

Iterates are stacked as (m, n) arrays with agent i's vector in row i.
Iteration counting starts at k = 1 so that alpha_k = alpha0 / k is defined
at the first gradient step.
"""

import hashlib
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .bounds import first_small_step
from .box import Box, project_box
from .config import serialize_config
from .consensus import average_priorities, make_priority_state, priority_step, random_priorities
from .errors import DivergenceError, DomainError, ShapeError, StepIndexError
from .graph import graph_from_spec
from .mixing import build_mixing_matrix, stationary_weights
from .problems import ProblemStack, generate_problem_set, gradient_bound, load_problems, weighted_optimum

logger = logging.getLogger(__name__)

GRADIENT_AT = ("iterate", "mixed")


@dataclass(frozen=True)
class StepSchedule:
    alpha0: float = 0.2

    def __post_init__(self):
        if self.alpha0 < 0:
            raise DomainError(f"alpha0 must be non-negative, got {self.alpha0}")


def step_size(k, schedule):
    """alpha_k = alpha0 / k."""
    if k < 1:
        raise StepIndexError(f"Step size is defined for k >= 1, got k={k}")
    return schedule.alpha0 / k


@dataclass(frozen=True)
class SwarmState:
    """Iterates x(k) together with what the step that produced them applied.

    v, phi_err, grad and mixing describe the step k-1 -> k and are None for
    the initial state.
    """
    x: np.ndarray
    y: np.ndarray
    k: int = 1
    v: np.ndarray = None
    phi_err: np.ndarray = None
    grad: np.ndarray = None
    mixing: np.ndarray = None

    @property
    def m(self):
        return self.x.shape[0]


def average_state(state):
    """y(k) = (1/m) sum_j x^j(k)."""
    x = getattr(state, "x", state)
    return np.asarray(x, dtype=float).mean(axis=0)


def initial_swarm_state(x0, box):
    x0 = np.array(x0, dtype=float)
    if x0.ndim != 2:
        raise ShapeError(f"Initial iterates must be an (m, n) table, got shape {x0.shape}")
    if not box.contains(x0):
        raise DomainError("Initial iterates must lie inside the box")
    return SwarmState(x=x0, y=average_state(x0), k=1)


def algorithm_step(state, priorities, g, problems, schedule, box, gradient_at="iterate"):
    """Advance the swarm from iteration k to k+1; returns (state, priorities).

    The mixing matrix of step k is built from the priorities held at k; the
    priorities handed back are one consensus step further.
    """
    if not isinstance(problems, ProblemStack):
        problems = ProblemStack.from_problems(problems)
    if state.x.shape != (g.m, problems.n) or priorities.m != g.m or problems.m != g.m:
        raise ShapeError(
            f"Inconsistent sizes: iterates {state.x.shape}, priorities {priorities.w.shape}, "
            f"graph m={g.m}, problems m={problems.m} n={problems.n}"
        )
    k = state.k
    alpha = step_size(k, schedule)

    next_priorities = priority_step(priorities, g)
    mixing = build_mixing_matrix(priorities, g)
    v = mixing.mix(state.x)
    if gradient_at == "iterate":
        grad = problems.gradients(state.x)
    elif gradient_at == "mixed":
        grad = problems.gradients(v)
    else:
        raise DomainError(f"gradient_at must be one of {GRADIENT_AT}, got '{gradient_at}'")

    target = v - alpha * grad
    if not np.all(np.isfinite(target)):
        raise DivergenceError(k)
    x = project_box(target, box)

    new_state = SwarmState(
        x=x, y=x.mean(axis=0), k=k + 1, v=v, phi_err=x - target, grad=grad, mixing=mixing.a,
    )
    return new_state, next_priorities


# ── Run harness ──────────────────────────────────────────────────────────


@dataclass(frozen=True)
class RunSetup:
    """Everything a run needs, materialized from a RunConfig."""
    graph: object
    priorities: object
    problems: ProblemStack
    x0: np.ndarray
    box: Box
    schedule: StepSchedule
    wbar: np.ndarray
    oracle_weights: np.ndarray
    oracle: object


@dataclass
class TraceRecord:
    k: int
    alpha_k: float
    disagreement: float
    sum_sq_dist_to_opt: float
    f_of_y: float
    min_w_entry: float
    y: np.ndarray
    agent_sq_dist: np.ndarray


@dataclass
class Trace:
    records: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    final_state: SwarmState = None
    final_priorities: object = None

    @property
    def ks(self):
        return [r.k for r in self.records]

    def record_at(self, k):
        for rec in self.records:
            if rec.k == k:
                return rec
        raise KeyError(f"No trace record for iteration {k}")


def _initial_priorities(config, g):
    spec = config.priorities
    if spec.kind == "table":
        table = spec.rows
    else:
        seed = spec.seed if spec.seed is not None else np.random.SeedSequence([config.seed, 1])
        table = random_priorities(config.m, seed, spec.min_weight)
    return make_priority_state(table, g, config.c)


def _initial_iterates(config, box):
    spec = config.iterates
    if spec.kind == "table":
        x0 = np.array(spec.rows, dtype=float)
        if x0.shape != (config.m, config.n):
            raise ShapeError(f"iterates.rows has shape {x0.shape}, expected ({config.m}, {config.n})")
        return x0
    seed = spec.seed if spec.seed is not None else np.random.SeedSequence([config.seed, 2])
    return box.sample(np.random.default_rng(seed), (config.m, config.n))


def _problem_set(config):
    spec = config.problems
    if spec.path:
        problems = load_problems(spec.path)
        if len(problems) != config.m or problems[0].n != config.n:
            raise ShapeError(
                f"{spec.path} holds {len(problems)} problem(s) of dimension {problems[0].n}, "
                f"config asks for m={config.m}, n={config.n}"
            )
        return ProblemStack.from_problems(problems)
    return ProblemStack.from_problems(generate_problem_set(
        config.seed, config.m, config.n, shift=spec.shift, r_scale=spec.r_scale, c_scale=spec.c_scale,
    ))


def prepare_run(config):
    g = graph_from_spec(config.m, config.graph)
    box = Box(config.box.lower, config.box.upper)
    priorities = _initial_priorities(config, g)
    problems = _problem_set(config)
    wbar = average_priorities(priorities)
    if config.oracle_weights == "stationary":
        limit = np.tile(wbar, (config.m, 1))
        oracle_weights = stationary_weights(build_mixing_matrix(limit, g))
    else:
        oracle_weights = wbar
    oracle = weighted_optimum(problems, oracle_weights, box)
    logger.info(f"Oracle ({oracle.method}): f* = {oracle.f_star:.10g}")
    return RunSetup(
        graph=g,
        priorities=priorities,
        problems=problems,
        x0=_initial_iterates(config, box),
        box=box,
        schedule=StepSchedule(config.alpha0),
        wbar=wbar,
        oracle_weights=oracle_weights,
        oracle=oracle,
    )


def _record(state, priorities, setup):
    x, y = state.x, state.y
    agent_sq_dist = np.sum((x - setup.oracle.x_star) ** 2, axis=1)
    return TraceRecord(
        k=state.k,
        alpha_k=step_size(state.k, setup.schedule),
        disagreement=float(np.max(np.linalg.norm(x - y, axis=1))),
        sum_sq_dist_to_opt=float(agent_sq_dist.sum()),
        f_of_y=float(setup.oracle_weights @ setup.problems.values_at(y)),
        min_w_entry=priorities.min_entry,
        y=y.copy(),
        agent_sq_dist=agent_sq_dist,
    )


def config_hash(config):
    return hashlib.sha256(serialize_config(config).encode("utf-8")).hexdigest()


def run_trace(config, setup=None):
    """Run config.iterations algorithm steps and return the recorded Trace."""
    setup = setup or prepare_run(config)
    started = time.time()
    state = initial_swarm_state(setup.x0, setup.box)
    priorities = setup.priorities
    final_k = config.iterations + 1
    window_start = first_small_step(config.alpha0, config.bound_epsilon) + 3
    pinned = {1, window_start, final_k}

    trace = Trace(metadata={
        "config_hash": config_hash(config),
        "seed": config.seed,
        "oracle_f_star": setup.oracle.f_star,
        "oracle_method": setup.oracle.method,
        "x_star": setup.oracle.x_star.tolist(),
        "wbar": setup.wbar.tolist(),
        "oracle_weights": setup.oracle_weights.tolist(),
        "M": float(np.linalg.norm(setup.x0, axis=1).sum()),
        "L": gradient_bound(setup.problems, setup.box),
        "window_start": window_start,
    })
    trace.records.append(_record(state, priorities, setup))
    logger.info(f"Starting run '{config.name}': m={config.m}, n={config.n}, {config.iterations} iterations")

    for _ in range(config.iterations):
        state, priorities = algorithm_step(
            state, priorities, setup.graph, setup.problems, setup.schedule, setup.box, config.gradient_at,
        )
        if state.k % config.record_every == 0 or state.k in pinned:
            rec = _record(state, priorities, setup)
            trace.records.append(rec)
            logger.debug(f"k={rec.k} disagreement={rec.disagreement:.3e} f(y)={rec.f_of_y:.10g}")

    trace.final_state = state
    trace.final_priorities = priorities
    trace.metadata["runtime_seconds"] = time.time() - started
    logger.info(f"Finished run '{config.name}' in {trace.metadata['runtime_seconds']:.2f}s, "
                f"f(y) = {trace.records[-1].f_of_y:.10g}")
    return trace
