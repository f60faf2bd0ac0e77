"""Command-line entry point: ``padicount <subcommand> [options]``.

Exit codes: 0 all hard invariants held, 2 some invariant was violated,
1 bad configuration or a runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import experiments, verify
from .experiments import ConfigError, ExperimentConfig


def _parse_seeds(value: str) -> list[int]:
    """``"1,2,3"``, ``"0-9"`` or ``@path`` (a file of whitespace/comma separated integers)."""
    if value.startswith("@"):
        value = Path(value[1:]).read_text()
    seeds: list[int] = []
    for token in value.replace(",", " ").split():
        if "-" in token[1:]:
            lo, hi = token.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(token))
    if not seeds:
        raise argparse.ArgumentTypeError("no seeds given")
    return seeds


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padicount", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in experiments.SUBCOMMANDS:
        sp = sub.add_parser(name, help=f"run a {name} sweep")
        sp.add_argument("--config", type=Path, help="JSON config; defaults to the built-in grid")
        sp.add_argument("--out", type=Path, help="CSV output path (default: stdout)")
        sp.add_argument("--seeds", type=_parse_seeds, help="override the config's seeds")
        sp.add_argument("--parallel", type=int, help="worker processes")
        sp.add_argument("--budget-ops", type=int, help="operation budget per run")
    vp = sub.add_parser("verify", help="run the acceptance checks")
    vp.add_argument("--profile", choices=verify.PROFILES, default="smoke")
    vp.add_argument("--out", type=Path, help="summary CSV path (default: stdout)")
    vp.add_argument("--seeds", type=_parse_seeds, help="master seed (first value is used)")
    vp.add_argument("--only", type=_parse_seeds, help="criterion numbers to run")
    return parser


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


def _run_verify(args) -> int:
    master = args.seeds[0] if args.seeds else verify.DEFAULT_MASTER_SEED
    only = set(args.only) if args.only else None
    results = verify.run_suite(args.profile, master, only)
    for r in results:
        print(r.line(), file=sys.stderr)
    _emit(verify.summary_csv(results, args.profile, master), args.out)
    return 0 if all(r.passed for r in results) else 2


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.subcommand == "verify":
        return _run_verify(args)
    try:
        if args.config:
            config = ExperimentConfig.load(args.config)
            if config.subcommand != args.subcommand:
                raise ConfigError(f"config is for {config.subcommand!r}, not {args.subcommand!r}")
        else:
            config = ExperimentConfig(args.subcommand)
        if args.seeds:
            config.seeds = args.seeds
        if args.parallel:
            config.parallel = args.parallel
        if args.budget_ops:
            config.budget_ops = args.budget_ops
        config.__post_init__()
    except (ConfigError, json.JSONDecodeError, OSError) as exc:
        print(f"padicount: {exc}", file=sys.stderr)
        return 1
    result = experiments.execute(config)
    out = args.out or (Path(config.out) if config.out else None)
    _emit(result.csv, out)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
