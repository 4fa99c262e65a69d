"""Command-line front end.

    beamsparse run --config experiment.json [--output-dir DIR] [--seed S] [--quiet]

Exit codes: 0 when the solver converged, 2 when it hit the iteration budget
without converging, 1 on any error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .admm import converged
from .config import load_config
from .errors import BeamsparseError
from .runner import run_experiment


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamsparse",
        description="Joint beampattern matching and sparse antenna selection",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment from a JSON config")
    run.add_argument("--config", required=True, help="path to the experiment JSON")
    run.add_argument("--output-dir", default=None, help="override the config's output directory")
    run.add_argument("--seed", type=int, default=None, help="override the config's RNG seed")
    run.add_argument("--quiet", action="store_true", help="suppress the summary printout")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.output_dir is not None:
            overrides["output_dir"] = args.output_dir
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            cfg = cfg.with_overrides(**overrides)
        report = run_experiment(cfg)
    except (BeamsparseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    done = converged(report.trace, cfg.eta)
    if not args.quiet:
        status = "converged" if done else "stopped at iteration budget"
        print(f"{status} after {report.iterations} iterations ({report.runtime_seconds:.2f} s)")
        print(f"selected elements: {report.cardinality} / {cfg.n_elements}")
        print(f"matching error:    {report.matching_error_db:.3f} dB")
        print(f"peak sidelobe:     {report.peak_sidelobe_db:.3f} dB")
        print(f"artifacts written to {cfg.output_dir}")
    return 0 if done else 2


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    raise AssertionError("unreachable")  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
