"""
Command-line entry point: run, sweep, bounds, oracle and scenario
subcommands on top of the PriorityConsensus service class.

Exit codes: 0 on success, 2 for invalid input or configuration, 1 for
anything unexpected.
"""

import argparse
import json
import logging
import os
import sys
from configparser import ConfigParser

from .PriorityConsensusImpl import SCENARIOS, PriorityConsensus
from .errors import PriorityConsensusError, SweepRunError

logger = logging.getLogger(__name__)

SECTION = "PriorityConsensus"


def read_deploy_config(path=None):
    """[PriorityConsensus] section of the deployment INI as a dict, or {} when absent."""
    path = path or os.environ.get("DEPLOYMENT_CONFIG")
    if not path:
        return {}
    parser = ConfigParser()
    if not parser.read(path) or not parser.has_section(SECTION):
        logger.warning(f"No [{SECTION}] section found in {path}, using defaults")
        return {}
    return dict(parser.items(SECTION))


def _add_run_flags(sub, config_required=True):
    sub.add_argument("--config", required=config_required, help="YAML run configuration")
    sub.add_argument("--seed", type=int, help="override the run seed")
    sub.add_argument("--out", help="output directory (default: a fresh directory under scratch)")
    sub.add_argument("--record-every", type=int, dest="record_every", help="trace sampling interval")
    sub.add_argument("--workers", type=int, help="worker processes for sweeps")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="priority-consensus",
        description="Decentralized multi-objective optimization with priority consensus",
    )
    parser.add_argument("--deploy-config", dest="deploy_config", help="deployment INI (env DEPLOYMENT_CONFIG)")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    _add_run_flags(commands.add_parser("run", help="run one trace"))
    _add_run_flags(commands.add_parser("sweep", help="Pareto sweep over initial priority tables"))
    _add_run_flags(commands.add_parser("bounds", help="measured quantities against their rate bounds"))
    _add_run_flags(commands.add_parser("oracle", help="print the centralized weighted optimum"))

    scenario = commands.add_parser("scenario", help="run a preset scenario")
    scenario.add_argument("name", help=f"one of {', '.join(SCENARIOS)} or custom")
    scenario.add_argument("--full", action="store_true", help="full-scale variant where one exists")
    _add_run_flags(scenario, config_required=False)
    return parser


def _params(args):
    return {
        "config": args.config,
        "seed": args.seed,
        "out": args.out,
        "record_every": args.record_every,
        "workers": args.workers,
    }


def dispatch(service, args):
    params = _params(args)
    if args.command == "run":
        result = service.run_trace(params)
        print(json.dumps(result["summary"], indent=4))
    elif args.command == "bounds":
        result = service.run_bounds(params)
        print(result["bounds_csv"])
    elif args.command == "sweep":
        result = service.run_sweep(params)
        print(result["sweep_csv"])
        logger.info(f"Non-dominated runs: {', '.join(result['front'])}")
    elif args.command == "oracle":
        print(json.dumps(service.run_oracle(params), indent=4))
    elif args.command == "scenario":
        result = service.run_scenario({**params, "name": args.name, "full": args.full})
        print(json.dumps(result["summary"], indent=4))


def main(argv=None):
    args = build_parser().parse_args(argv)
    deploy = read_deploy_config(args.deploy_config)
    if args.verbose:
        deploy["log-level"] = "DEBUG"
    service = PriorityConsensus(deploy)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    try:
        dispatch(service, args)
    except SweepRunError as e:
        for run_id, err in e.failures:
            logger.error(f"{run_id}: {err}")
        logger.error(str(e))
        return 2
    except PriorityConsensusError as e:
        logger.error(str(e))
        return 2
    except Exception:
        logger.exception("Unexpected failure")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
