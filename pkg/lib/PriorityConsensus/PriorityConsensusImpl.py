# -*- coding: utf-8 -*-
import json
import logging
import os
import uuid

import numpy as np
import pandas as pd

from .bounds import BOUNDS_COLUMNS, bound_params, bounds_table
from .config import apply_overrides, load_config, parse_config
from .csv_export import sweep_frame, trace_frame, write_csv
from .errors import UsageError, VacuousBoundError
from .optimizer import prepare_run, run_trace
from .pareto import default_sweep_grid, pareto_filter, sweep
from .problems import relative_gap


SCENARIO_DIR = os.path.join(os.path.dirname(__file__), "..", "..", "data", "scenarios")
SCENARIOS = ("pareto2", "quad3x10", "quad100x100")


class PriorityConsensus:
    '''
    Module Name:
    PriorityConsensus

    Module Description:
    Decentralized multi-objective optimization with priority consensus.
    Agents agree on objective priorities while running projected gradient
    descent over a box, mixing iterates through priority-weighted matrices.
    '''

    VERSION = "0.1.0"

    def _validate_params(self, params, required_keys):
        """Validate that required parameters are present."""
        for key in required_keys:
            if key not in params or params[key] is None:
                raise UsageError(f"Required parameter '{key}' is missing")

    def _run_config(self, params):
        if params.get("run_config") is not None:
            cfg = params["run_config"]
        elif params.get("config_text") is not None:
            cfg = parse_config(params["config_text"])
        elif params.get("config") is not None:
            cfg = load_config(params["config"])
        else:
            raise UsageError("One of 'config', 'config_text' or 'run_config' is required")
        overrides = dict(params.get("overrides") or {})
        for key, target in (("seed", "seed"), ("out", "output.dir"),
                            ("record_every", "record_every"), ("workers", "workers")):
            if params.get(key) is not None:
                overrides[target] = params[key]
        if overrides:
            cfg = apply_overrides(cfg, **overrides)
        return cfg

    def _output_dir(self, cfg):
        out = cfg.output.dir or os.path.join(self.shared_folder, str(uuid.uuid4()))
        os.makedirs(out, exist_ok=True)
        return out

    def _summary(self, cfg, trace):
        final = trace.records[-1]
        f_star = trace.metadata["oracle_f_star"]
        return {
            "name": cfg.name,
            "config_hash": trace.metadata["config_hash"],
            "seed": cfg.seed,
            "iterations": cfg.iterations,
            "final_k": final.k,
            "final_f_of_y": final.f_of_y,
            "oracle_f_star": f_star,
            "oracle_method": trace.metadata["oracle_method"],
            "relative_gap": relative_gap(final.f_of_y, f_star),
            "final_disagreement": final.disagreement,
            "runtime_seconds": trace.metadata["runtime_seconds"],
        }

    def _write_summary(self, path, summary):
        with open(path, 'w') as f:
            json.dump(summary, f, indent=4)
        self.logger.info(f"Summary written to {path}")

    def __init__(self, config):
        config = config or {}
        self.config = config
        self.shared_folder = config.get('scratch') or os.path.join(os.getcwd(), 'scratch')
        self.workers = int(config.get('workers') or 1)
        logging.basicConfig(format='%(created)s %(levelname)s: %(message)s',
                            level=getattr(logging, str(config.get('log-level', 'INFO')).upper(), logging.INFO))
        self.logger = logging.getLogger(__name__)

    def run_trace(self, params):
        """
        Run one trace and write the trace CSV and summary JSON.
        :param params: one of 'config' (path), 'config_text' or 'run_config',
           plus optional 'seed', 'out', 'record_every', 'workers', 'overrides'
        :returns: dict with 'output_dir', 'trace_csv', 'summary' and the 'trace'
        """
        cfg = self._run_config(params)
        out = self._output_dir(cfg)
        trace = run_trace(cfg)
        trace_csv = write_csv(trace_frame(trace), os.path.join(out, cfg.output.trace))
        summary = self._summary(cfg, trace)
        self._write_summary(os.path.join(out, cfg.output.summary), summary)
        return {"output_dir": out, "trace_csv": trace_csv, "summary": summary, "trace": trace}

    def run_bounds(self, params):
        """
        Run one trace and write measured disagreement / optimality next to their bounds.
        When beta rounds to 1 the bounds carry no information: the table is empty
        and 'params' is None.
        """
        cfg = self._run_config(params)
        out = self._output_dir(cfg)
        setup = prepare_run(cfg)
        trace = run_trace(cfg, setup)
        try:
            p = bound_params(setup.priorities, trace.metadata["M"], trace.metadata["L"], cfg.alpha0, cfg.bound_epsilon)
        except VacuousBoundError as e:
            self.logger.warning(f"Bounds are vacuous for this run, writing an empty table: {e}")
            p, table = None, pd.DataFrame(columns=BOUNDS_COLUMNS)
        else:
            self.logger.info(f"Bound constants: eta={p.eta:.4g}, beta={p.beta:.6g}, C={p.C:.6g}, K={p.K}")
            table = bounds_table(trace, setup.graph, p)
        bounds_csv = write_csv(table, os.path.join(out, cfg.output.bounds))
        return {"output_dir": out, "bounds_csv": bounds_csv, "bounds": table, "params": p, "trace": trace}

    def run_sweep(self, params):
        """
        Rerun the config once per initial priority table.
        :param params: run config parameters plus optional 'tables' (list of m x m
           tables); two-agent configs default to the config's sweep grid
        :returns: dict with 'sweep_csv', 'points' and the non-dominated 'front' run ids
        """
        cfg = self._run_config(params)
        tables = params.get("tables")
        if tables is None:
            if cfg.m != 2:
                raise UsageError(f"Sweep without explicit 'tables' needs m = 2, config has m = {cfg.m}")
            tables = default_sweep_grid(cfg.sweep.points, cfg.sweep.low, cfg.sweep.high)
        out = self._output_dir(cfg)
        workers = cfg.workers if cfg.workers > 1 else self.workers
        points = sweep(cfg, [np.asarray(t, dtype=float) for t in tables], workers)
        front = pareto_filter([tuple(pt.f_values) for pt in points])
        front_ids = [pt.run_id for pt in points if tuple(pt.f_values) in set(front)]
        sweep_csv = write_csv(sweep_frame(points), os.path.join(out, cfg.output.sweep))
        return {"output_dir": out, "sweep_csv": sweep_csv, "points": points, "front": front_ids}

    def run_oracle(self, params):
        """Centralized weighted optimum for a config: x*, f* and the weights used."""
        cfg = self._run_config(params)
        setup = prepare_run(cfg)
        return {
            "x_star": setup.oracle.x_star.tolist(),
            "f_star": setup.oracle.f_star,
            "method": setup.oracle.method,
            "weights": setup.oracle_weights.tolist(),
        }

    def run_scenario(self, params):
        """
        Run a preset scenario from data/scenarios.
        :param params: 'name' (pareto2, quad3x10, quad100x100 or custom with 'config'),
           optional 'full', 'overrides' and the run_trace overrides
        :returns: dict with the written artifact paths and the summary
        """
        self._validate_params(params, ['name'])
        name = params['name']
        if name == "custom":
            self._validate_params(params, ['config'])
            cfg = self._run_config(params)
        elif name in SCENARIOS:
            stem = f"{name}.full" if params.get("full") and name == "quad100x100" else name
            if params.get("full") and name != "quad100x100":
                self.logger.warning(f"Scenario {name} has no full-scale variant, running the default")
            cfg = self._run_config({**params, "config": os.path.join(SCENARIO_DIR, f"{stem}.yaml")})
        else:
            raise UsageError(f"Unknown scenario '{name}', expected one of {', '.join(SCENARIOS)} or custom")

        cfg = apply_overrides(cfg, **{"output.dir": self._output_dir(cfg)})
        self.logger.info(f"Scenario {cfg.name}: m={cfg.m}, n={cfg.n}, {cfg.iterations} iterations")
        result = self.run_bounds({"run_config": cfg})
        out, trace = result["output_dir"], result["trace"]
        artifacts = {
            "output_dir": out,
            "trace_csv": write_csv(trace_frame(trace), os.path.join(out, cfg.output.trace)),
            "bounds_csv": result["bounds_csv"],
            "bounds_vacuous": result["params"] is None,
        }
        if name == "pareto2":
            artifacts["sweep_csv"] = self.run_sweep({"run_config": cfg})["sweep_csv"]
        summary = self._summary(cfg, trace)
        self._write_summary(os.path.join(out, cfg.output.summary), summary)
        artifacts["summary"] = summary
        return artifacts

    def status(self):
        return {'state': "OK", 'message': "", 'version': self.VERSION}
