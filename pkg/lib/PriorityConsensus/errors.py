"""
Exception hierarchy for PriorityConsensus.

Everything derives from ValueError so callers that only guard against bad
input keep working.
"""


class PriorityConsensusError(ValueError):
    """Base class for all errors raised by this package."""


class InvalidEdgeError(PriorityConsensusError):
    """Edge list contains a self-loop or a malformed pair."""


class ConnectivityError(PriorityConsensusError):
    """Communication graph is not connected."""


class AgentRangeError(PriorityConsensusError):
    """Agent label outside 1..m."""


class GainRangeError(PriorityConsensusError):
    """Consensus gain c outside (0, 1/max_degree)."""


class SimplexError(PriorityConsensusError):
    """Priority table row is not a valid probability vector."""


class DomainError(PriorityConsensusError):
    """Argument outside the domain where a formula is defined."""


class VacuousBoundError(DomainError):
    """Geometric constants degenerate in floating point (beta rounds to 1)."""


class ShapeError(PriorityConsensusError):
    """Array dimensions do not agree."""


class NumericError(PriorityConsensusError):
    """NaN input or a numerically singular system."""


class DivergenceError(PriorityConsensusError):

    def __init__(self, iteration, message=None):
        self.iteration = iteration
        super().__init__(message or f"Non-finite iterate at iteration {iteration}")


class StepIndexError(PriorityConsensusError, IndexError):
    """Step size requested for an iteration index below 1."""


class StrictParseError(PriorityConsensusError):

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class UsageError(PriorityConsensusError):
    """Bad command-line usage, e.g. an unknown scenario name."""


class SweepRunError(PriorityConsensusError):

    def __init__(self, failures, points):
        self.failures = failures
        self.points = points
        run_ids = ", ".join(run_id for run_id, _ in failures)
        super().__init__(f"{len(failures)} sweep run(s) failed: {run_ids}")
