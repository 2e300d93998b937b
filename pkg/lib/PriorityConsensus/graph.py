"""
Undirected communication topology and the matrices derived from it.

Agents are labelled 1..m at the boundary (config files, CLI) and indexed
0..m-1 everywhere inside the package.
"""

import logging
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .errors import AgentRangeError, ConnectivityError, InvalidEdgeError

logger = logging.getLogger(__name__)


def _frozen(array):
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Graph:
    """Connected undirected graph with dense adjacency, degree and Laplacian.

    ``edges`` holds zero-based pairs (i, j) with i < j.
    """
    m: int
    edges: frozenset
    adjacency: np.ndarray
    degree: np.ndarray
    laplacian: np.ndarray
    max_degree: int
    q_matrix: np.ndarray

    @property
    def q_tilde(self):
        return 1 - self.q_matrix

    def neighbors(self, i):
        return [int(j) for j in np.flatnonzero(self.adjacency[i])]

    def has_edge(self, i, j):
        return bool(self.adjacency[i, j])

    def edge_labels(self):
        """Edges as sorted 1-based pairs, the form used in config files."""
        return sorted((i + 1, j + 1) for i, j in self.edges)


def build_graph(m, edges):
    """Build and validate a Graph from an agent count and 1-based edge pairs.

    Raises InvalidEdgeError on self-loops, AgentRangeError on labels outside
    1..m and ConnectivityError when some agent cannot be reached (BFS).
    """
    if int(m) != m or m < 1:
        raise AgentRangeError(f"Agent count must be a positive integer, got {m}")
    m = int(m)

    pairs = set()
    for pair in edges:
        try:
            a, b = (int(v) for v in pair)
        except (TypeError, ValueError):
            raise InvalidEdgeError(f"Edge {pair!r} is not a pair of agent labels")
        for label in (a, b):
            if label < 1 or label > m:
                raise AgentRangeError(f"Edge ({a},{b}) references agent {label} outside 1..{m}")
        if a == b:
            raise InvalidEdgeError(f"Self-loop on agent {a}")
        pairs.add((min(a, b) - 1, max(a, b) - 1))

    nx_graph = nx.Graph()
    nx_graph.add_nodes_from(range(m))
    nx_graph.add_edges_from(pairs)
    if not nx.is_connected(nx_graph):
        components = [sorted(c + 1 for c in comp) for comp in nx.connected_components(nx_graph)]
        raise ConnectivityError(f"Graph is disconnected, components: {components}")

    adjacency = nx.to_numpy_array(nx_graph, nodelist=range(m), dtype=np.int64)
    degree = adjacency.sum(axis=1)
    laplacian = np.diag(degree) - adjacency
    q_matrix = adjacency + np.eye(m, dtype=np.int64)

    logger.debug(f"Built graph with {m} agents, {len(pairs)} edges, max degree {degree.max()}")
    return Graph(
        m=m,
        edges=frozenset(pairs),
        adjacency=_frozen(adjacency),
        degree=_frozen(degree),
        laplacian=_frozen(laplacian),
        max_degree=int(degree.max()),
        q_matrix=_frozen(q_matrix),
    )


def complete_edges(m):
    return [(i, j) for i in range(1, m + 1) for j in range(i + 1, m + 1)]


def path_edges(m):
    return [(i, i + 1) for i in range(1, m)]


def graph_from_spec(m, spec):
    """Build the graph named in a run config: "complete", "path" or an edge list."""
    if isinstance(spec, str):
        if spec == "complete":
            return build_graph(m, complete_edges(m))
        if spec == "path":
            return build_graph(m, path_edges(m))
        raise InvalidEdgeError(f"Unknown graph keyword '{spec}' (expected complete, path or an edge list)")
    return build_graph(m, spec)
