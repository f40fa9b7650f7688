"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
Outputs go to ``$VHD_OUT_DIR`` (default ``./out``).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .equilibria import ConvergenceError
from .integrate import IntegrationError
from .scenario import (
    PRESETS,
    ConfigError,
    ScenarioConfig,
    default_out_dir,
    load_config,
    preset,
    preset_digest,
    report_formulas,
    run,
)
from .sensitivity import sensitivity

__all__ = ["EXIT_CONFIG", "EXIT_NUMERIC", "EXIT_OK", "build_parser", "main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _config(source: str) -> ScenarioConfig:
    # a bare preset name is accepted when no file of that name exists
    if source in PRESETS and not Path(source).exists():
        return preset(source)
    return load_config(source)


def _simulate(args) -> int:
    cfg = _config(args.config)
    result = run(cfg, default_out_dir())
    for path in (result.csv_path, result.report_path):
        if path is not None:
            print(path)
    return EXIT_OK


def _analyze(args) -> int:
    cfg = _config(args.config)
    result = run(cfg, default_out_dir(), simulate=False)
    if result.report_path is not None:
        print(result.report_path.read_text(), end="")
    return EXIT_OK


def _sensitivity(args) -> int:
    cfg = _config(args.config)
    table = sensitivity(args.target, cfg.params)
    lines = [f"# normalized sensitivity indices of {table.target}", "parameter,index"]
    lines += [f"{name},{value:.17g}" for name, value in table.ranked()]
    text = "\n".join(lines) + "\n"
    out_dir = default_out_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{cfg.name}_sensitivity_{args.target}.csv").write_text(text)
    print(text, end="")
    return EXIT_OK


def _presets(args) -> int:
    for name, (overrides, g0) in PRESETS.items():
        settings = ", ".join(f"{k}={v:g}" for k, v in overrides.items())
        print(f"{name}: {settings}, G0={g0:g}  sha256={preset_digest(preset(name))[:16]}")
    return EXIT_OK


def _report_formulas(args) -> int:
    cfg = _config(args.config)
    free = [name for item in args.free for name in item.split(",") if name]
    try:
        report = report_formulas(cfg.params, free)
    except ValueError as exc:
        raise ConfigError(str(exc), key="--free") from exc
    print(report.text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vhd", description="Vector-host-predator model runner.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a scenario and write CSV plus report")
    p.add_argument("config", help="config file, or a preset name")
    p.set_defaults(func=_simulate)

    p = sub.add_parser("analyze", help="write and print the analysis report only")
    p.add_argument("config")
    p.set_defaults(func=_analyze)

    p = sub.add_parser("sensitivity", help="sensitivity indices of one target")
    p.add_argument("config")
    p.add_argument("--target", choices=("r0sq", "o0", "o"), required=True)
    p.set_defaults(func=_sensitivity)

    p = sub.add_parser("presets", help="list the reference scenarios")
    p.add_argument("action", choices=("list",))
    p.set_defaults(func=_presets)

    p = sub.add_parser("report-formulas", help="R0 with free parameters factored out")
    p.add_argument("config")
    p.add_argument(
        "--free", nargs="*", default=[], metavar="NAME",
        help="subset of a_v, c_vh, c_hv (space or comma separated)",
    )
    p.set_defaults(func=_report_formulas)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        # invalid input surfacing from the library, e.g. a target that is zero
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"integration failed: {exc} (partial output kept with .partial suffix)", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConvergenceError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
