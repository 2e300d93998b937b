"""
Run configuration: a single YAML document parsed strictly into frozen
dataclasses, with defaults resolved against the communication graph.
"""

import logging
from dataclasses import asdict, dataclass, field, fields, replace

import yaml

from .consensus import resolve_gain, validate_priorities
from .errors import PriorityConsensusError, StrictParseError
from .graph import graph_from_spec

logger = logging.getLogger(__name__)

GRAPH_KEYWORDS = ("complete", "path")
ORACLE_WEIGHTS = ("consensus", "stationary")


@dataclass(frozen=True)
class BoxSpec:
    lower: float = -1000.0
    upper: float = 1000.0


@dataclass(frozen=True)
class PrioritySpec:
    kind: str = "random"
    rows: tuple = None
    seed: int = None
    min_weight: float = 0.05


@dataclass(frozen=True)
class IterateSpec:
    kind: str = "random"
    rows: tuple = None
    seed: int = None


@dataclass(frozen=True)
class ProblemSpec:
    shift: float = 0.1
    r_scale: float = 10.0
    c_scale: float = 10.0
    path: str = None


@dataclass(frozen=True)
class SweepSpec:
    points: int = 11
    low: float = 0.05
    high: float = 0.95


@dataclass(frozen=True)
class OutputSpec:
    dir: str = None
    trace: str = "trace.csv"
    bounds: str = "bounds.csv"
    sweep: str = "sweep.csv"
    summary: str = "summary.json"


@dataclass(frozen=True)
class RunConfig:
    m: int
    n: int
    graph: object
    seed: int
    iterations: int
    name: str = "custom"
    alpha0: float = 0.2
    c: float = None
    record_every: int = 100
    box: BoxSpec = field(default_factory=BoxSpec)
    priorities: PrioritySpec = field(default_factory=PrioritySpec)
    iterates: IterateSpec = field(default_factory=IterateSpec)
    gradient_at: str = "iterate"
    epsilon: float = None
    oracle_weights: str = "consensus"
    problems: ProblemSpec = field(default_factory=ProblemSpec)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    workers: int = 1
    output: OutputSpec = field(default_factory=OutputSpec)

    @property
    def bound_epsilon(self):
        """Step-size threshold for K; follows alpha0 unless set explicitly."""
        return self.alpha0 if self.epsilon is None else self.epsilon


NESTED = {
    "box": BoxSpec,
    "priorities": PrioritySpec,
    "iterates": IterateSpec,
    "problems": ProblemSpec,
    "sweep": SweepSpec,
    "output": OutputSpec,
}
REQUIRED = ("m", "n", "graph", "seed", "iterations")


def _tuple_rows(rows, path):
    if rows is None:
        return None
    try:
        return tuple(tuple(float(v) for v in row) for row in rows)
    except (TypeError, ValueError):
        raise StrictParseError(path, "expected a table of numbers")


def _build(cls, data, path):
    if not isinstance(data, dict):
        raise StrictParseError(path, f"expected a mapping, got {type(data).__name__}")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        prefix = f"{path}." if path else ""
        raise StrictParseError(prefix + unknown[0], "unknown field")
    values = {}
    for key, value in data.items():
        sub_path = f"{path}.{key}" if path else key
        if cls is RunConfig and key in NESTED:
            value = _build(NESTED[key], value or {}, sub_path)
        elif key == "rows":
            value = _tuple_rows(value, sub_path)
        values[key] = value
    return cls(**values)


def _check(condition, field_path, message):
    if not condition:
        raise StrictParseError(field_path, message)


def _as_int(value, field_path):
    _check(isinstance(value, int) and not isinstance(value, bool), field_path, f"expected an integer, got {value!r}")
    return value


def _as_float(value, field_path):
    _check(isinstance(value, (int, float)) and not isinstance(value, bool), field_path,
           f"expected a number, got {value!r}")
    return float(value)


def resolve_config(config):
    """Validate every field and fill the graph-dependent gain default."""
    m = _as_int(config.m, "m")
    n = _as_int(config.n, "n")
    _check(m >= 1, "m", "must be at least 1")
    _check(n >= 1, "n", "must be at least 1")
    _as_int(config.seed, "seed")
    _check(_as_int(config.iterations, "iterations") >= 0, "iterations", "must be non-negative")
    _check(_as_int(config.record_every, "record_every") >= 1, "record_every", "must be at least 1")
    _check(_as_int(config.workers, "workers") >= 1, "workers", "must be at least 1")
    alpha0 = _as_float(config.alpha0, "alpha0")
    _check(alpha0 > 0, "alpha0", "must be positive")
    _check(config.gradient_at in ("iterate", "mixed"), "gradient_at", "must be 'iterate' or 'mixed'")
    _check(config.oracle_weights in ORACLE_WEIGHTS, "oracle_weights", f"must be one of {ORACLE_WEIGHTS}")

    graph = config.graph
    if isinstance(graph, str):
        _check(graph in GRAPH_KEYWORDS, "graph", f"expected one of {GRAPH_KEYWORDS} or an edge list")
    else:
        _check(isinstance(graph, (list, tuple)), "graph", "expected a keyword or a list of pairs")
        graph = tuple(tuple(pair) for pair in graph)
    g = graph_from_spec(m, graph)
    c = resolve_gain(config.c, g)

    epsilon = config.epsilon
    if epsilon is not None:
        epsilon = _as_float(epsilon, "epsilon")
        _check(epsilon > 0, "epsilon", "must be positive")

    box = config.box
    _check(_as_float(box.lower, "box.lower") < _as_float(box.upper, "box.upper"), "box", "lower must be below upper")

    pri = config.priorities
    _check(pri.kind in ("table", "random"), "priorities.kind", "must be 'table' or 'random'")
    if pri.kind == "table":
        _check(pri.rows is not None, "priorities.rows", "required when kind is 'table'")
        validate_priorities(pri.rows)
        _check(len(pri.rows) == m, "priorities.rows", f"expected {m} agent rows")
    else:
        _check(0 < _as_float(pri.min_weight, "priorities.min_weight") < 1, "priorities.min_weight", "must lie in (0, 1)")

    its = config.iterates
    _check(its.kind in ("table", "random"), "iterates.kind", "must be 'table' or 'random'")
    if its.kind == "table":
        _check(its.rows is not None, "iterates.rows", "required when kind is 'table'")
        _check(len(its.rows) == m and all(len(r) == n for r in its.rows), "iterates.rows", f"expected an {m} x {n} table")

    sweep = config.sweep
    _check(_as_int(sweep.points, "sweep.points") >= 1, "sweep.points", "must be at least 1")
    _check(0 < _as_float(sweep.low, "sweep.low") <= _as_float(sweep.high, "sweep.high") < 1, "sweep",
           "need 0 < low <= high < 1")

    return replace(
        config,
        graph=graph,
        c=c,
        alpha0=alpha0,
        epsilon=epsilon,
        box=BoxSpec(float(box.lower), float(box.upper)),
    )


def parse_config(text):
    """Parse a YAML run config; raises StrictParseError / GainRangeError / SimplexError."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise StrictParseError("<document>", f"malformed YAML: {e}")
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise StrictParseError("<document>", "expected a mapping at the top level")
    missing = [key for key in REQUIRED if key not in data]
    if missing:
        raise StrictParseError(missing[0], "required field is missing")
    if data.get("c") == "auto":
        data["c"] = None
    return resolve_config(_build(RunConfig, data, ""))


def load_config(path):
    with open(path) as f:
        config = parse_config(f.read())
    logger.info(f"Loaded run config '{config.name}' from {path}")
    return config


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def serialize_config(config):
    """YAML text that parse_config maps back to an equal RunConfig."""
    return yaml.safe_dump(_plain(asdict(config)), sort_keys=False, default_flow_style=None)


def apply_overrides(config, **overrides):
    """Replace top-level or dotted nested fields, then re-validate.

    Example: apply_overrides(cfg, seed=3, **{"output.dir": "out"}).
    """
    top, nested = {}, {}
    for key, value in overrides.items():
        if value is None:
            continue
        if "." in key:
            section, sub = key.split(".", 1)
            nested.setdefault(section, {})[sub] = value
        else:
            top[key] = value
    unknown = sorted(set(top) - {f.name for f in fields(RunConfig)})
    if unknown:
        raise StrictParseError(unknown[0], "unknown field")
    for section, values in nested.items():
        if section not in NESTED:
            raise StrictParseError(section, "unknown section")
        try:
            top[section] = replace(getattr(config, section), **values)
        except TypeError as e:
            raise StrictParseError(section, str(e))
    try:
        return resolve_config(replace(config, **top))
    except PriorityConsensusError:
        raise
    except (TypeError, ValueError) as e:
        raise StrictParseError("<overrides>", str(e))
