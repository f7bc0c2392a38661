"""Command-line runner.

    recurrence-lab <subcommand> [--config PATH] [--out DIR] [--seed U64]
                                [--samples N] [--plot]
    recurrence-lab plot [--csv PATH] [--svg PATH] [--out DIR]

Exit codes: 0 when every verdict is PASS or SKIPPED, 1 when one FAILs,
2 for configuration errors, 3 when an estimator cannot produce a result.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import acceptance, pipelines, plotting
from . import recurrence as rec
from .config import ExperimentConfig, default_config, load_config
from .estimators import verdicts_to_json
from .exceptions import ConfigError, RecurrenceLabError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3

SUBCOMMANDS = ("entropy", "pressure", "minimal-return", "dimension",
               "inequalities", "verify", "plot")

_RUNNERS = {
    "entropy": pipelines.run_entropy,
    "pressure": pipelines.run_pressure,
    "minimal-return": pipelines.run_minimal_return,
    "dimension": pipelines.run_dimension,
    "inequalities": pipelines.run_inequalities,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="recurrence-lab",
                description="Entropy, dimension and recurrence estimates from "
                            "return times of model dynamical systems.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="JSON experiment configuration "
                                    "(default: the shipped configuration)")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--seed", help="64-bit seed (overrides the config)")
    p.add_argument("--samples", help="sample count (overrides the config)")
    p.add_argument("--plot", action="store_true",
                   help="also write plot.svg from the grids of this run")
    p.add_argument("--csv", help="plot: grids CSV to read (default OUT/grids.csv)")
    p.add_argument("--svg", help="plot: SVG file to write (default OUT/plot.svg)")
    return p


def _overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    changes = {}
    for flag, key in (("seed", "seed"), ("samples", "sample_count")):
        raw = getattr(args, flag)
        if raw is None:
            continue
        try:
            changes[key] = int(raw, 10)
        except ValueError:
            raise ConfigError(f"--{flag} must be an integer") from None
    return cfg.replace(**changes) if changes else cfg


def _write_json(path: Path, text: str):
    path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _print_verdicts(verdicts, stream):
    for v in verdicts:
        lhs = "-" if v.lhs is None else f"{v.lhs:.6g}"
        rhs = "-" if v.rhs is None else f"{v.rhs:.6g}"
        print(f"{v.status:7s} {v.relation}  [{lhs} vs {rhs}, tol {v.tolerance:.3g}]",
              file=stream)


def _exit_code(verdicts) -> int:
    return EXIT_FAIL if any(v.status == "FAIL" for v in verdicts) else EXIT_OK


def run(argv=None, stdout=None) -> int:
    """Entry point returning the exit code instead of raising SystemExit."""
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config) if args.config else default_config()
        cfg = _overrides(cfg, args)
        pipelines.thread_count()          # validate the environment early
        out = Path(args.out or cfg.output_dir)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.subcommand == "plot":
            csv_path = Path(args.csv) if args.csv else out / "grids.csv"
            svg_path = Path(args.svg) if args.svg else out / "plot.svg"
            svg_path.parent.mkdir(parents=True, exist_ok=True)
            plotting.plot(csv_path, svg_path)
            print(f"wrote {svg_path}", file=stdout)
            return EXIT_OK

        if args.subcommand == "verify":
            results = acceptance.run_all(cfg.seed)
            verdicts = acceptance.flatten(results)
            reports = []
            grids = None
        else:
            res = _RUNNERS[args.subcommand](cfg)
            verdicts, reports, grids = res.verdicts, res.reports, res.grids
    except (RecurrenceLabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    # all files are written after the results are complete
    out.mkdir(parents=True, exist_ok=True)
    if grids is not None:
        rec.write_grids_csv(grids, out / "grids.csv")
        if args.plot:
            plotting.plot(out / "grids.csv", out / "plot.svg")
    if args.subcommand != "verify":
        _write_json(out / "reports.json",
                    json.dumps([r.to_dict() for r in reports], indent=2))
    _write_json(out / "verdicts.json", verdicts_to_json(verdicts, indent=2))
    _print_verdicts(verdicts, stdout)
    return _exit_code(verdicts)


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
