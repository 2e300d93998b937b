# -*- coding: utf-8 -*-
import unittest

import numpy as np

from PriorityConsensus.errors import AgentRangeError, ConnectivityError, InvalidEdgeError
from PriorityConsensus.graph import build_graph, complete_edges, graph_from_spec, path_edges


class GraphTest(unittest.TestCase):

    def test_path_laplacian(self):
        g = build_graph(3, [(1, 2), (2, 3)])
        np.testing.assert_array_equal(g.laplacian, [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])
        self.assertEqual(g.max_degree, 2)
        np.testing.assert_array_equal(g.q_matrix, [[1, 1, 0], [1, 1, 1], [0, 1, 1]])
        np.testing.assert_array_equal(g.q_tilde, [[0, 0, 1], [0, 0, 0], [1, 0, 0]])

    def test_complete_graph(self):
        g = build_graph(4, complete_edges(4))
        self.assertEqual(g.max_degree, 3)
        np.testing.assert_array_equal(g.degree, [3, 3, 3, 3])
        np.testing.assert_array_equal(g.laplacian.sum(axis=1), np.zeros(4))
        self.assertEqual(g.neighbors(0), [1, 2, 3])

    def test_single_agent(self):
        g = build_graph(1, [])
        self.assertEqual(g.max_degree, 0)
        np.testing.assert_array_equal(g.laplacian, [[0]])

    def test_duplicate_and_reversed_edges(self):
        g = build_graph(3, [(1, 2), (2, 1), (3, 2)])
        self.assertEqual(g.edge_labels(), [(1, 2), (2, 3)])
        self.assertTrue(g.has_edge(2, 1))
        self.assertFalse(g.has_edge(0, 2))

    def test_arrays_are_read_only(self):
        g = build_graph(2, [(1, 2)])
        with self.assertRaises(ValueError):
            g.adjacency[0, 0] = 1

    def test_errors(self):
        with self.assertRaises(ConnectivityError):
            build_graph(3, [(1, 2)])
        with self.assertRaises(InvalidEdgeError):
            build_graph(2, [(1, 1), (1, 2)])
        with self.assertRaises(AgentRangeError):
            build_graph(3, [(1, 4), (1, 2), (2, 3)])
        with self.assertRaises(AgentRangeError):
            build_graph(0, [])
        with self.assertRaises(InvalidEdgeError):
            graph_from_spec(3, "ring")

    def test_graph_from_spec(self):
        self.assertEqual(graph_from_spec(4, "path").edge_labels(), path_edges(4))
        self.assertEqual(graph_from_spec(3, "complete").edge_labels(), [(1, 2), (1, 3), (2, 3)])
        self.assertEqual(graph_from_spec(3, [[1, 3], [3, 2]]).edge_labels(), [(1, 3), (2, 3)])
