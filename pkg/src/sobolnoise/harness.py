"""Experiment runner: replicated noise-correction studies over a budget.

Each replicate draws its own pick-freeze design from a child seed,
evaluates the model (noisily when a noise spec is configured, including
the repeated pass that realizes the virtual noise variable), estimates
raw indices, applies the correction, and appends one row per variable
plus one row for the noise itself. Failed replicates (guard trips,
degenerate output, model errors) are recorded and skipped so sweeps
degrade gracefully.
"""

from __future__ import annotations

import csv
import functools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .correction import (
    VARIANCE_FORMS,
    CorrectedResult,
    NoiseSpec,
    apply_correction,
    noisy_eval_batch,
    passthrough,
)
from .errors import (
    ConfigError,
    DegenerateModelError,
    ModelEvaluationError,
    NoiseGuardError,
    SingularModelError,
)
from .estimators import EvaluationBundle, IndexEstimateSet, estimate_all
from .external import ExternalModel
from .models import (
    InputSpec,
    ModelSpec,
    TrueIndices,
    benchmark,
    true_indices,
)
from .sampling import (
    STREAM_A,
    STREAM_B,
    STREAM_NOISE,
    STREAM_REPLICATE,
    budget_to_n,
    build_pickfreeze,
    child_seed,
    sample_uniform,
    stream_rng,
)

CSV_COLUMNS = (
    "replicate",
    "variable",
    "s_raw",
    "t_raw",
    "s_corr",
    "t_corr",
    "bias_s",
    "bias_t",
    "var_s",
    "var_t",
    "t_t_eps",
    "d_hat",
)

#: Budget of the noise-free steel run that stands in for unpublished truth.
STEEL_REFERENCE_BUDGET = 500_000


@dataclass(frozen=True)
class IndexReference:
    """Reference main/total values for plots and comparisons.

    Unlike TrueIndices these may come from a high-budget estimation run,
    so no index-range invariants are enforced.
    """

    main: np.ndarray
    total: np.ndarray


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one replicated study."""

    model: ModelSpec
    budget: int
    noise: NoiseSpec | None = None
    replicates: int = 100
    bootstrap_resamples: int = 100
    master_seed: int = 42
    correction: bool = True
    variance_form: str = "as_printed"
    outputs: dict[str, str] = field(default_factory=dict)
    truth: IndexReference | None = None
    label: str = ""

    def __post_init__(self) -> None:
        if self.replicates < 1:
            raise ConfigError("replicates must be at least 1")
        if self.variance_form not in VARIANCE_FORMS:
            raise ConfigError(f"variance_form must be one of {VARIANCE_FORMS}")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be non-negative")
        # Raises early when the budget cannot afford 2 rows.
        budget_to_n(self.budget, self.model.dimension, self.noise is not None)
        if not self.label:
            self.label = f"{self.model.name} (budget {self.budget})"


@dataclass(frozen=True)
class ResultRow:
    replicate: int
    variable: str
    s_raw: float | None
    t_raw: float | None
    s_corr: float | None
    t_corr: float | None
    bias_s: float | None
    bias_t: float | None
    var_s: float | None
    var_t: float | None
    t_t_eps: float | None
    d_hat: float


@dataclass
class ResultTable:
    """Per-replicate, per-variable estimates plus run-level bookkeeping."""

    rows: list[ResultRow]
    variables: tuple[str, ...]
    virtual_name: str | None
    replicates_attempted: int
    rows_per_design: int
    evaluations_per_replicate: int
    truth: IndexReference | None
    label: str
    correction_applied: bool = False
    failures: list[tuple[int, str]] = field(default_factory=list)

    @property
    def replicates_succeeded(self) -> int:
        return self.replicates_attempted - len(self.failures)

    def column(self, name: str, variable: str) -> np.ndarray:
        """All values of one CSV column for one variable, in replicate order."""
        values = [
            getattr(r, name) for r in self.rows if r.variable == variable
        ]
        return np.array([np.nan if v is None else v for v in values])

    def mean_over_replicates(self, name: str) -> np.ndarray:
        """Across-replicate mean of a column for each controlled variable."""
        return np.array([np.nanmean(self.column(name, v)) for v in self.variables])

    def summary(self) -> list[dict[str, float | str]]:
        """Mean, std and quartiles across replicates per variable and column."""
        out: list[dict[str, float | str]] = []
        names = list(self.variables) + ([self.virtual_name] if self.virtual_name else [])
        for variable in names:
            for name in ("s_raw", "t_raw", "s_corr", "t_corr"):
                values = self.column(name, variable)
                values = values[~np.isnan(values)]
                if values.size == 0:
                    continue
                q25, q50, q75 = np.percentile(values, [25, 50, 75])
                out.append(
                    {
                        "variable": variable,
                        "column": name,
                        "mean": float(values.mean()),
                        "std": float(values.std(ddof=1)) if values.size > 1 else 0.0,
                        "q25": float(q25),
                        "q50": float(q50),
                        "q75": float(q75),
                    }
                )
        return out


def run_experiment(config: ExperimentConfig) -> ResultTable:
    """Run the replicated study described by ``config``.

    Deterministic end-to-end given the master seed: replicate r uses the
    child seed derived from (master_seed, r) for its design, noise and
    bootstrap streams.
    """
    model = config.model
    noise = config.noise
    noisy = noise is not None
    d = model.dimension
    n = budget_to_n(config.budget, d, noisy)
    virtual_name = model.virtual_name if noisy else None

    rows: list[ResultRow] = []
    failures: list[tuple[int, str]] = []
    for r in range(config.replicates):
        seed_r = child_seed(config.master_seed, r)
        a = sample_uniform(model.inputs, n, seed_r, STREAM_A)
        b = sample_uniform(model.inputs, n, seed_r, STREAM_B)
        design = build_pickfreeze(a, b)
        try:
            bundle = _evaluate(design, model, noise, seed_r)
            raw = estimate_all(design, bundle, config.bootstrap_resamples, seed_r)
            if noisy and config.correction:
                corrected = apply_correction(raw, config.variance_form)
            else:
                corrected = passthrough(raw)
        except (
            DegenerateModelError,
            NoiseGuardError,
            ModelEvaluationError,
            SingularModelError,
        ) as exc:
            failures.append((r, f"{type(exc).__name__}: {exc}"))
            continue
        rows.extend(_result_rows(r, model, raw, corrected, virtual_name))

    return ResultTable(
        rows=rows,
        variables=tuple(s.name for s in model.controlled),
        virtual_name=virtual_name,
        replicates_attempted=config.replicates,
        rows_per_design=n,
        evaluations_per_replicate=n * (d + 2) + (n if noisy else 0),
        truth=config.truth,
        label=config.label,
        correction_applied=noisy and config.correction,
        failures=failures,
    )


def _evaluate(design, model: ModelSpec, noise: NoiseSpec | None, seed: int) -> EvaluationBundle:
    matrices = [design.a.values, design.b.values, *design.mixed]
    if noise is None:
        ys = [np.asarray(model.evaluate(m), dtype=float) for m in matrices]
        y_replicate = None
    else:
        rng = stream_rng(seed, STREAM_NOISE)
        ys = [noisy_eval_batch(model, m, noise, rng) for m in matrices]
        rng_rep = stream_rng(seed, STREAM_REPLICATE)
        y_replicate = noisy_eval_batch(model, design.a.values, noise, rng_rep)
    return EvaluationBundle(
        y_a=ys[0], y_b=ys[1], y_mixed=tuple(ys[2:]), y_replicate=y_replicate
    )


def _result_rows(
    r: int,
    model: ModelSpec,
    raw: IndexEstimateSet,
    corrected: CorrectedResult,
    virtual_name: str | None,
) -> list[ResultRow]:
    rows = []
    applied = corrected.correction_applied
    for i, spec in enumerate(model.controlled):
        rows.append(
            ResultRow(
                replicate=r,
                variable=spec.name,
                s_raw=float(raw.main[i]),
                t_raw=float(raw.total[i]),
                s_corr=float(corrected.main[i]),
                t_corr=float(corrected.total[i]),
                bias_s=float(corrected.bias_main[i]),
                bias_t=float(corrected.bias_total[i]),
                var_s=float(corrected.var_main[i]),
                var_t=float(corrected.var_total[i]),
                t_t_eps=raw.virtual_total,
                d_hat=raw.total_variance,
            )
        )
    if virtual_name is not None:
        rows.append(
            ResultRow(
                replicate=r,
                variable=virtual_name,
                s_raw=None,
                t_raw=raw.virtual_total,
                s_corr=None,
                t_corr=0.0 if applied else None,
                bias_s=None,
                bias_t=None,
                var_s=None,
                var_t=raw.var_virtual,
                t_t_eps=raw.virtual_total,
                d_hat=raw.total_variance,
            )
        )
    return rows


def _format_cell(value: float | int | str | None) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return format(value, ".9g")


def emit_csv(table: ResultTable, path: str) -> None:
    """Write one data row per (replicate, variable), 9 significant digits."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in table.rows:
            writer.writerow(
                _format_cell(getattr(row, col)) for col in CSV_COLUMNS
            )


# ---------------------------------------------------------------------------
# Presets: the replicated benchmark studies at their published budgets.

_PRESETS: dict[str, tuple[str, NoiseSpec, int]] = {
    "linear2000": ("linear", NoiseSpec((0.0, 1.0), (0.0, 3.0)), 2000),
    "linear20000": ("linear", NoiseSpec((0.0, 1.0), (0.0, 3.0)), 20000),
    "gfunction2000": ("gfunction", NoiseSpec((-0.25, 0.25), (-1.0, 1.0)), 2000),
    "gfunction20000": ("gfunction", NoiseSpec((-0.25, 0.25), (-1.0, 1.0)), 20000),
    # The uncontrolled yield stress, fresh U(465, 535) per evaluation, is
    # exactly additive noise of +/-35 around the nominal 500 because the
    # response is linear in Fs with unit coefficient.
    "steel50000": ("steel", NoiseSpec((0.0, 0.0), (-35.0, 35.0)), 50000),
}

PRESET_NAMES = tuple(sorted(_PRESETS))


@functools.lru_cache(maxsize=None)
def steel_reference(seed: int = 42) -> IndexReference:
    """Operational truth for the steel column: a high-budget noise-free run.

    The steel benchmark has no closed-form indices, so a single replicate
    at budget 500000 with the yield stress held at its nominal value
    serves as the comparison point.
    """
    table = run_experiment(
        ExperimentConfig(
            model=benchmark("steel"),
            budget=STEEL_REFERENCE_BUDGET,
            noise=None,
            replicates=1,
            master_seed=seed,
            label="steel reference",
        )
    )
    return IndexReference(
        main=table.mean_over_replicates("s_raw"),
        total=table.mean_over_replicates("t_raw"),
    )


def preset_config(
    name: str,
    seed: int = 42,
    replicates: int = 100,
    correction: bool = True,
    variance_form: str = "as_printed",
) -> ExperimentConfig:
    """Build the configuration of a named preset study."""
    try:
        model_id, noise, budget = _PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {list(PRESET_NAMES)}"
        ) from None
    if model_id == "steel":
        truth = steel_reference(seed)
    else:
        known = true_indices(model_id)
        truth = IndexReference(main=known.main, total=known.total)
    return ExperimentConfig(
        model=benchmark(model_id),
        budget=budget,
        noise=noise,
        replicates=replicates,
        master_seed=seed,
        correction=correction,
        variance_form=variance_form,
        truth=truth,
        label=f"{name} ({model_id}, budget {budget})",
    )


def run_preset(
    name: str,
    seed: int = 42,
    replicates: int = 100,
    correction: bool = True,
    variance_form: str = "as_printed",
) -> ResultTable:
    """Run a named preset study."""
    return run_experiment(
        preset_config(name, seed, replicates, correction, variance_form)
    )


# ---------------------------------------------------------------------------
# Config files.

_CONFIG_KEYS = {
    "model",
    "noise",
    "budget",
    "replicates",
    "bootstrap_resamples",
    "master_seed",
    "correction",
    "variance_form",
    "outputs",
}
_MODEL_KEYS = {"command", "inputs"}
_NOISE_KEYS = {"alpha", "beta"}
_OUTPUT_KEYS = {"csv", "plot"}


def _require_keys(mapping: dict, allowed: set[str], context: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown {context} fields: {sorted(unknown)}")


def _parse_bounds(value, context: str) -> tuple[float, float]:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) for v in value)
    ):
        raise ConfigError(f"{context} must be a [lower, upper] pair of numbers")
    return float(value[0]), float(value[1])


def _parse_model(value) -> ModelSpec:
    if isinstance(value, str):
        try:
            return benchmark(value)
        except Exception as exc:
            raise ConfigError(str(exc)) from exc
    if not isinstance(value, dict):
        raise ConfigError("model must be a benchmark id or an external-command object")
    _require_keys(value, _MODEL_KEYS, "model")
    command = value.get("command")
    if not isinstance(command, list) or not all(isinstance(c, str) for c in command):
        raise ConfigError("model.command must be a list of strings")
    raw_inputs = value.get("inputs")
    if not isinstance(raw_inputs, list) or not raw_inputs:
        raise ConfigError("model.inputs must be a non-empty list")
    inputs = []
    for entry in raw_inputs:
        if not isinstance(entry, dict):
            raise ConfigError("model.inputs entries must be objects")
        _require_keys(entry, {"name", "lower", "upper", "role"}, "model input")
        try:
            inputs.append(
                InputSpec(
                    name=str(entry["name"]),
                    lower=entry.get("lower"),
                    upper=entry.get("upper"),
                    role=entry.get("role", "controlled"),
                )
            )
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad model input: {exc}") from exc
    try:
        return ModelSpec("external", tuple(inputs), ExternalModel(command))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(data: dict) -> ExperimentConfig:
    """Validate a decoded config mapping; unknown fields are rejected."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    _require_keys(data, _CONFIG_KEYS, "config")
    if "model" not in data or "budget" not in data:
        raise ConfigError("config requires 'model' and 'budget'")
    model = _parse_model(data["model"])
    noise = None
    if data.get("noise") is not None:
        if not isinstance(data["noise"], dict):
            raise ConfigError("noise must be an object with alpha and beta bounds")
        _require_keys(data["noise"], _NOISE_KEYS, "noise")
        try:
            noise = NoiseSpec(
                alpha=_parse_bounds(data["noise"].get("alpha", [0.0, 0.0]), "noise.alpha"),
                beta=_parse_bounds(data["noise"].get("beta", [0.0, 0.0]), "noise.beta"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    outputs = data.get("outputs", {})
    if not isinstance(outputs, dict) or not all(
        isinstance(v, str) for v in outputs.values()
    ):
        raise ConfigError("outputs must map names to file paths")
    _require_keys(outputs, _OUTPUT_KEYS, "outputs")
    budget = data["budget"]
    if not isinstance(budget, int) or isinstance(budget, bool):
        raise ConfigError("budget must be an integer")

    def _int(key, default):
        v = data.get(key, default)
        if not isinstance(v, int) or isinstance(v, bool):
            raise ConfigError(f"{key} must be an integer")
        return v

    correction = data.get("correction", True)
    if not isinstance(correction, bool):
        raise ConfigError("correction must be a boolean")
    variance_form = data.get("variance_form", "as_printed")
    try:
        return ExperimentConfig(
            model=model,
            budget=budget,
            noise=noise,
            replicates=_int("replicates", 100),
            bootstrap_resamples=_int("bootstrap_resamples", 100),
            master_seed=_int("master_seed", 42),
            correction=correction,
            variance_form=variance_form,
            outputs=dict(outputs),
        )
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> ExperimentConfig:
    """Load and validate a JSON experiment configuration file."""
    try:
        with open(path) as f:
            data = json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
    return parse_config(data)
