"""Command-line runner: ``tractorlab <suite> [--config FILE] [--seed N] [--steps N] [--json]``.

Each subcommand runs a fixed list of experiments (see :data:`SUITES`).  With
``--config`` the experiments come from a JSON file instead: a single config
object, a list of them, or ``{"experiments": [...]}``.  ``--seed`` and
``--steps`` override the corresponding config fields.

Exit status: 0 when every record passes, 1 when any fails, 2 on a bad config.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import SUITES, ExperimentConfig, emit_report, run_experiment


class ConfigError(ValueError):
    pass


def load_configs(path: str | Path) -> list[dict]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if isinstance(data, dict) and "experiments" in data:
        data = data["experiments"]
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list) or not all(isinstance(d, dict) for d in data):
        raise ConfigError("config must be an object, a list of objects, or {'experiments': [...]}")
    return data


def build_configs(suite: str, config: str | None, seed: int | None, steps: int | None) -> list[ExperimentConfig]:
    raw = load_configs(config) if config else [{"experiment": e} for e in SUITES[suite]]
    out = []
    for d in raw:
        d = dict(d)
        if "experiment" not in d:
            raise ConfigError(f"config entry without 'experiment': {d}")
        if seed is not None:
            d["seed"] = seed
        if steps is not None:
            d["steps"] = steps
        try:
            out.append(ExperimentConfig.from_dict(d))
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc
    return out


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tractorlab", description="Run tractor-calculus experiments.")
    sub = parser.add_subparsers(dest="suite", required=True)
    for name in SUITES:
        p = sub.add_parser(name, help=f"run the {name} experiments")
        p.add_argument("--config", help="JSON experiment config file")
        p.add_argument("--seed", type=int, help="override the RNG seed")
        p.add_argument("--steps", type=int, help="override RK4 steps per unit parameter")
        p.add_argument("--json", action="store_true", help="emit only the JSON lines")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        configs = build_configs(args.suite, args.config, args.seed, args.steps)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    records = [run_experiment(c) for c in configs]
    sys.stdout.write(emit_report(records, json_only=args.json))
    return 0 if all(r.passed for r in records) else 1


if __name__ == "__main__":
    sys.exit(main())
