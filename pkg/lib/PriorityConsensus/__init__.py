from .PriorityConsensusImpl import PriorityConsensus

__all__ = ["PriorityConsensus"]
