"""Command line interface.

    sobolnoise run --config study.json [--out results.csv] [--plot results.svg]
    sobolnoise preset linear20000 [--seed S] [--replicates R]
                                  [--no-correction] [--variance-form printed|ratio]
                                  [--out CSV] [--plot SVG]
    sobolnoise eval --model linear --input 1,0,0,0.7

Exit codes: 0 success, 2 configuration error, 3 model evaluation failure,
4 no replicate survived the guard/degeneracy checks.
"""

from __future__ import annotations

import argparse
import sys

from .errors import (
    ConfigError,
    DomainError,
    ModelEvaluationError,
    SingularModelError,
    UnknownModelError,
)
from .harness import PRESET_NAMES, ResultTable, emit_csv, load_config, run_experiment, run_preset
from .models import eval_gfunction, eval_linear, eval_steel_column

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MODEL = 3
EXIT_ALL_FAILED = 4

_VARIANCE_FORM_FLAGS = {"printed": "as_printed", "ratio": "standard_ratio"}

_EVAL_FUNCS = {
    "linear": (eval_linear, 4),
    "gfunction": (eval_gfunction, 6),
    "steel": (eval_steel_column, 9),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sobolnoise",
        description="Noise-corrected Sobol' sensitivity analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a study described by a JSON config file")
    p_run.add_argument("--config", required=True, help="path to the JSON config")
    p_run.add_argument("--out", help="write per-replicate results to this CSV file")
    p_run.add_argument("--plot", help="write a boxplot report to this SVG file")

    p_preset = sub.add_parser("preset", help="run a named benchmark study")
    p_preset.add_argument("name", choices=PRESET_NAMES)
    p_preset.add_argument("--seed", type=int, default=42)
    p_preset.add_argument("--replicates", type=int, default=100)
    p_preset.add_argument("--no-correction", action="store_true")
    p_preset.add_argument(
        "--variance-form", choices=sorted(_VARIANCE_FORM_FLAGS), default="printed"
    )
    p_preset.add_argument("--out", help="write per-replicate results to this CSV file")
    p_preset.add_argument("--plot", help="write a boxplot report to this SVG file")

    p_eval = sub.add_parser("eval", help="evaluate a benchmark model once")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--input", required=True, help="comma-separated input values")
    return parser


def _print_summary(table: ResultTable) -> None:
    print(f"# {table.label}")
    print(
        f"# replicates: {table.replicates_succeeded}/{table.replicates_attempted} ok, "
        f"n={table.rows_per_design}, "
        f"{table.evaluations_per_replicate} evaluations per replicate"
    )
    for r, message in table.failures:
        print(f"# replicate {r} failed: {message}")
    header = f"{'variable':>10} {'column':>7} {'mean':>12} {'std':>12} {'q25':>12} {'q50':>12} {'q75':>12}"
    print(header)
    for entry in table.summary():
        print(
            f"{entry['variable']:>10} {entry['column']:>7} "
            f"{entry['mean']:>12.6g} {entry['std']:>12.6g} "
            f"{entry['q25']:>12.6g} {entry['q50']:>12.6g} {entry['q75']:>12.6g}"
        )


def _emit_outputs(table: ResultTable, csv_path: str | None, plot_path: str | None) -> int:
    if csv_path:
        emit_csv(table, csv_path)
        print(f"# wrote {csv_path}")
    if plot_path:
        from .plotting import emit_boxplot_svg

        emit_boxplot_svg(table, plot_path)
        print(f"# wrote {plot_path}")
    _print_summary(table)
    if table.replicates_succeeded == 0:
        model_failed = any("ModelEvaluationError" in msg for _, msg in table.failures)
        return EXIT_MODEL if model_failed else EXIT_ALL_FAILED
    return EXIT_OK


def _cmd_run(args) -> int:
    config = load_config(args.config)
    csv_path = args.out or config.outputs.get("csv")
    plot_path = args.plot or config.outputs.get("plot")
    table = run_experiment(config)
    return _emit_outputs(table, csv_path, plot_path)


def _cmd_preset(args) -> int:
    table = run_preset(
        args.name,
        seed=args.seed,
        replicates=args.replicates,
        correction=not args.no_correction,
        variance_form=_VARIANCE_FORM_FLAGS[args.variance_form],
    )
    return _emit_outputs(table, args.out, args.plot)


def _cmd_eval(args) -> int:
    try:
        func, arity = _EVAL_FUNCS[args.model]
    except KeyError:
        raise UnknownModelError(
            f"unknown model {args.model!r}; available: {sorted(_EVAL_FUNCS)}"
        ) from None
    try:
        values = [float(v) for v in args.input.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad --input: {exc}") from exc
    if len(values) != arity:
        raise ConfigError(f"model {args.model!r} takes {arity} inputs, got {len(values)}")
    print(format(func(values), ".12g"))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "preset": _cmd_preset, "eval": _cmd_eval}
    try:
        return handlers[args.command](args)
    except (ConfigError, UnknownModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModelEvaluationError, DomainError, SingularModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
