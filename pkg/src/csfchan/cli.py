"""Command-line entry point for the simulation experiments.

Subcommands: fig2, sweep-length, sweep-snr, invariance.  Configuration
comes from a YAML file (--config), with every key overridable from the
command line via --set section.key=value; the common knobs also have
dedicated flags.  Each run writes <name>.csv and <name>.json into the
output directory and exits nonzero when the experiment's built-in checks
fail.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from .experiments import (
    resolve_config,
    run_datalength_sweep,
    run_fig2,
    run_invariance_demo,
    run_snr_sweep,
)
from .report import config_hash, write_sidecar, write_table

_RUNNERS = {
    "fig2": run_fig2,
    "sweep-length": run_datalength_sweep,
    "sweep-snr": run_snr_sweep,
    "invariance": run_invariance_demo,
}

_SECTION_OF = {
    "fig2": "fig2",
    "sweep-length": "sweep_length",
    "sweep-snr": "sweep_snr",
    "invariance": "invariance",
}


def _apply_override(cfg: dict, dotted: str) -> None:
    if "=" not in dotted:
        raise SystemExit(f"--set expects key=value, got {dotted!r}")
    key, raw = dotted.split("=", 1)
    value = yaml.safe_load(raw)
    node = cfg
    parts = key.split(".")
    for part in parts[:-1]:
        if part not in node or not isinstance(node[part], dict):
            raise SystemExit(f"unknown config section in --set: {key!r}")
        node = node[part]
    if parts[-1] not in node:
        raise SystemExit(f"unknown config key in --set: {key!r}")
    node[parts[-1]] = value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csfchan",
        description="Chaotic-waveform ACF experiments and blind channel identification",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=Path, default=None, help="YAML configuration file")
        p.add_argument("--seed", type=int, default=None, help="base seed (overrides config)")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--trials", type=int, default=None, help="Monte-Carlo trial count")
        p.add_argument("--threads", type=int, default=None, help="worker processes for trials")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            dest="overrides",
            help="override any config key, e.g. --set sweep_snr.symbols=2048",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    user_cfg = {}
    if args.config is not None:
        user_cfg = yaml.safe_load(args.config.read_text()) or {}
    cfg = resolve_config(user_cfg)
    cfg["experiment"] = args.command
    for flag in ("seed", "out", "trials", "threads"):
        value = getattr(args, flag)
        if value is not None:
            cfg[flag] = value if flag != "out" else str(value)
    for dotted in args.overrides:
        _apply_override(cfg, dotted)

    result = _RUNNERS[args.command](cfg)

    out_dir = Path(cfg["out"])
    cfg_hash = config_hash(cfg)
    write_table(out_dir / f"{result.name}.csv", result.columns, result.rows, cfg_hash)
    write_sidecar(out_dir / f"{result.name}.json", cfg, result.summary, result.passed)

    print(f"{result.name}: wrote {out_dir / (result.name + '.csv')} ({len(result.rows)} rows)")
    for key, value in result.summary.items():
        if not isinstance(value, (dict, list)):
            print(f"  {key}: {value}")
    if not result.passed:
        checks = result.summary.get("checks", {})
        failed = [k for k, ok in checks.items() if not ok]
        print(f"{result.name}: FAILED checks: {', '.join(failed) or 'see summary'}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
