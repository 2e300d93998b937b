# -*- coding: utf-8 -*-
import unittest

import numpy as np

from PriorityConsensus.box import Box, project_box
from PriorityConsensus.config import parse_config
from PriorityConsensus.consensus import make_priority_state, random_priorities
from PriorityConsensus.errors import DivergenceError, DomainError, NumericError, StepIndexError
from PriorityConsensus.graph import build_graph, complete_edges, path_edges
from PriorityConsensus.optimizer import (StepSchedule, algorithm_step, average_state,
                                         initial_swarm_state, run_trace, step_size)
from PriorityConsensus.problems import ProblemStack, QuadraticProblem, generate_problem_set, gradient_bound

HALF_SQUARE = QuadraticProblem(q_mat=np.eye(1), r_vec=np.zeros(1), c_scalar=0.0)


class StepSizeTest(unittest.TestCase):

    def test_examples(self):
        self.assertAlmostEqual(step_size(1, StepSchedule(0.2)), 0.2)
        self.assertAlmostEqual(step_size(4, StepSchedule(0.2)), 0.05)
        self.assertAlmostEqual(step_size(10, StepSchedule(1.0)), 0.1)

    def test_zero_index(self):
        with self.assertRaises(StepIndexError):
            step_size(0, StepSchedule())
        with self.assertRaises(IndexError):
            step_size(0, StepSchedule())

    def test_negative_alpha(self):
        with self.assertRaises(DomainError):
            StepSchedule(-0.1)


class ProjectionTest(unittest.TestCase):

    def test_clamp(self):
        np.testing.assert_array_equal(project_box([1500, -2000, 3], Box()), [1000, -1000, 3])
        np.testing.assert_array_equal(project_box([1.0, -2.0], Box()), [1.0, -2.0])

    def test_nan(self):
        with self.assertRaises(NumericError):
            project_box([np.nan, 0.0], Box())

    def test_projection_inequality(self):
        box = Box(-1.0, 1.0)
        x, y = np.array([2.0]), np.array([0.5])
        px = project_box(x, box)
        self.assertAlmostEqual(np.sum((px - y) ** 2), 0.25)
        self.assertLessEqual(np.sum((px - y) ** 2), np.sum((x - y) ** 2) - np.sum((px - x) ** 2))
        rng = np.random.default_rng(3)
        for _ in range(1000):
            x = rng.uniform(-4, 4, size=5)
            y = box.sample(rng, (1, 5))[0]
            px = project_box(x, box)
            self.assertLessEqual(np.sum((px - y) ** 2), np.sum((x - y) ** 2) - np.sum((px - x) ** 2) + 1e-12)

    def test_box_validation(self):
        with self.assertRaises(DomainError):
            Box(1.0, -1.0)
        with self.assertRaises(DomainError):
            Box(-np.inf, 1.0)


class AverageStateTest(unittest.TestCase):

    def test_examples(self):
        np.testing.assert_allclose(average_state(np.array([[1.0, 0.0], [0.0, 1.0]])), [0.5, 0.5])
        np.testing.assert_allclose(average_state(np.tile([2.0, 3.0], (4, 1))), [2.0, 3.0])
        np.testing.assert_allclose(average_state(np.array([[1.0], [2.0], [6.0]])), [3.0])


class AlgorithmStepTest(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.single = build_graph(1, [])
        cls.box = Box()

    def test_single_agent_projected_gradient(self):
        priorities = make_priority_state([[1.0]], self.single)
        state = initial_swarm_state([[1.0]], self.box)
        schedule = StepSchedule(0.2)
        state, priorities = algorithm_step(state, priorities, self.single, [HALF_SQUARE], schedule, self.box)
        self.assertAlmostEqual(state.x[0, 0], 0.8)
        self.assertEqual(state.k, 2)
        state, priorities = algorithm_step(state, priorities, self.single, [HALF_SQUARE], schedule, self.box)
        self.assertAlmostEqual(state.x[0, 0], 0.72)

    def test_uniform_mixing_of_equal_iterates(self):
        g = build_graph(3, complete_edges(3))
        priorities = make_priority_state(np.full((3, 3), 1 / 3), g)
        x = np.tile([4.0, -1.0], (3, 1))
        problems = generate_problem_set(0, 3, 2)
        state, _ = algorithm_step(initial_swarm_state(x, self.box), priorities, g, problems,
                                  StepSchedule(0.2), self.box)
        np.testing.assert_allclose(state.v, x, atol=1e-14)

    def test_zero_step_is_pure_averaging(self):
        g = build_graph(3, path_edges(3))
        priorities = make_priority_state(random_priorities(3, 1), g)
        x = np.random.default_rng(0).uniform(-10, 10, size=(3, 4))
        state, _ = algorithm_step(initial_swarm_state(x, self.box), priorities, g, generate_problem_set(1, 3, 4),
                                  StepSchedule(0.0), self.box)
        np.testing.assert_allclose(state.x, state.mixing @ x, atol=1e-12)
        np.testing.assert_array_equal(state.phi_err, np.zeros((3, 4)))

    def test_divergence(self):
        g = build_graph(2, [(1, 2)])
        priorities = make_priority_state([[0.5, 0.5], [0.5, 0.5]], g)
        huge = QuadraticProblem(q_mat=np.eye(1) * 1e308, r_vec=np.zeros(1), c_scalar=0.0)
        state = initial_swarm_state([[1000.0], [1000.0]], self.box)
        with self.assertRaises(DivergenceError) as ctx:
            algorithm_step(state, priorities, g, [huge, huge], StepSchedule(100.0), self.box)
        self.assertEqual(ctx.exception.iteration, 1)

    def test_gradient_at_switch(self):
        g = build_graph(2, [(1, 2)])
        priorities = make_priority_state([[0.5, 0.5], [0.5, 0.5]], g)
        with self.assertRaises(DomainError):
            algorithm_step(initial_swarm_state([[1.0], [3.0]], self.box), priorities, g,
                           [HALF_SQUARE, HALF_SQUARE], StepSchedule(), self.box, gradient_at="average")


class StepInvariantTest(unittest.TestCase):
    """Properties that must hold after every step of a 1,000-iteration three-agent run."""

    @classmethod
    def setUpClass(cls):
        cls.box = Box(-50.0, 50.0)
        cls.g = build_graph(3, path_edges(3))
        cls.problems = ProblemStack.from_problems(generate_problem_set(21, 3, 3, r_scale=200.0))
        cls.L = gradient_bound(cls.problems, cls.box)
        cls.w0 = random_priorities(3, 5)
        cls.x0 = cls.box.sample(np.random.default_rng(8), (3, 3))
        cls.test_points = np.vstack([np.zeros((1, 3)), cls.box.sample(np.random.default_rng(31), (9, 3))])

    def _run(self, gradient_at, steps=1000):
        priorities = make_priority_state(self.w0, self.g)
        state = initial_swarm_state(self.x0, self.box)
        schedule = StepSchedule(0.2)
        for _ in range(steps):
            nxt, priorities = algorithm_step(state, priorities, self.g, self.problems, schedule,
                                             self.box, gradient_at)
            yield state, nxt, step_size(state.k, schedule)
            state = nxt

    def test_projection_error_and_reconstruction(self):
        steps = 0
        for prev, state, alpha in self._run("iterate"):
            self.assertTrue(self.box.contains(state.x))
            norms = np.linalg.norm(state.phi_err, axis=1)
            self.assertTrue(np.all(norms <= alpha * self.L + 1e-12))
            rebuilt = state.v - alpha * state.grad + state.phi_err
            np.testing.assert_allclose(rebuilt, state.x, atol=1e-14 * max(1.0, np.abs(state.x).max()))
            steps += 1
        self.assertEqual(steps, 1000)

    def _assert_descent(self, gradient_at):
        self.assertTrue(self.box.contains(self.test_points))
        for prev, state, alpha in self._run(gradient_at):
            grad_sq = alpha ** 2 * np.sum(state.grad ** 2)
            phi_sq = np.sum(state.phi_err ** 2)
            values_v = np.sum(self.problems.values(state.v))
            for z in self.test_points:
                lhs = np.sum((state.x - z) ** 2)
                mixed = np.sum(state.mixing @ np.sum((prev.x - z) ** 2, axis=1))
                gap = values_v - np.sum(self.problems.values_at(z))
                rhs = mixed + grad_sq - 2 * alpha * gap - phi_sq
                self.assertLessEqual(lhs, rhs + 1e-9 * max(1.0, abs(rhs)))

    def test_descent_inequality_mixed_gradients(self):
        self._assert_descent("mixed")

    def test_descent_inequality_iterate_gradients(self):
        self._assert_descent("iterate")


class RunTraceTest(unittest.TestCase):

    def test_single_agent_trace(self):
        cfg = parse_config(
            "m: 1\nn: 1\ngraph: []\nseed: 0\niterations: 5\nrecord_every: 1\n"
            "priorities: {kind: table, rows: [[1.0]]}\n"
            "iterates: {kind: table, rows: [[1.0]]}\n"
        )
        trace = run_trace(cfg)
        self.assertEqual(trace.ks, [1, 2, 3, 4, 5, 6])
        self.assertTrue(all(rec.disagreement == 0.0 for rec in trace.records))
        p = generate_problem_set(0, 1, 1)[0]
        expected = 1.0 - 0.2 * (p.q_mat[0, 0] + p.r_vec[0])
        self.assertAlmostEqual(trace.record_at(2).y[0], expected, places=12)

    def test_zero_iterations(self):
        cfg = parse_config("m: 2\nn: 3\ngraph: complete\nseed: 1\niterations: 0\n")
        trace = run_trace(cfg)
        self.assertEqual(trace.ks, [1])
        self.assertEqual(trace.final_state.k, 1)

    def test_records_and_metadata(self):
        cfg = parse_config("m: 3\nn: 4\ngraph: path\nseed: 2\niterations: 250\nrecord_every: 100\n")
        trace = run_trace(cfg)
        self.assertEqual(trace.ks, [1, 4, 100, 200, 251])
        self.assertEqual(trace.metadata["window_start"], 4)
        self.assertEqual(trace.metadata["seed"], 2)
        self.assertEqual(len(trace.metadata["config_hash"]), 64)
        for rec in trace.records:
            self.assertGreaterEqual(rec.disagreement, 0.0)
            self.assertTrue(np.isfinite(rec.f_of_y))
        mins = [rec.min_w_entry for rec in trace.records]
        self.assertEqual(mins, sorted(mins))
        with self.assertRaises(KeyError):
            trace.record_at(3)

    def test_deterministic(self):
        cfg = parse_config("m: 3\nn: 4\ngraph: complete\nseed: 9\niterations: 50\nrecord_every: 10\n")
        a, b = run_trace(cfg), run_trace(cfg)
        np.testing.assert_array_equal(a.final_state.x, b.final_state.x)
        self.assertEqual(a.metadata["config_hash"], b.metadata["config_hash"])
