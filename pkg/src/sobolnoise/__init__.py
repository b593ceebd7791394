"""Noise-corrected Sobol' sensitivity analysis from pick-freeze designs."""

__version__ = "0.1.0"

from .correction import (
    CorrectedResult,
    NoiseSpec,
    analytic_noised_indices,
    apply_correction,
    correct_main,
    correct_total,
    correction_bias,
    corrected_variance,
    noisy_eval,
    passthrough,
)
from .errors import (
    ConfigError,
    DegenerateModelError,
    DesignError,
    DomainError,
    ModelEvaluationError,
    NoiseGuardError,
    SingularModelError,
    SobolNoiseError,
    UnknownModelError,
)
from .estimators import (
    EvaluationBundle,
    IndexEstimateSet,
    bootstrap_variances,
    estimate_all,
    estimate_jansen_total,
    estimate_main,
    estimate_total_variance,
)
from .external import ExternalModel
from .harness import (
    ExperimentConfig,
    ResultTable,
    emit_csv,
    load_config,
    run_experiment,
    run_preset,
)
from .models import (
    InputSpec,
    ModelSpec,
    TrueIndices,
    benchmark,
    eval_gfunction,
    eval_linear,
    eval_steel_column,
    true_indices,
)
from .sampling import (
    PickFreezeDesign,
    SampleMatrix,
    budget_to_n,
    build_pickfreeze,
    sample_uniform,
)

__all__ = [
    "CorrectedResult",
    "ConfigError",
    "DegenerateModelError",
    "DesignError",
    "DomainError",
    "EvaluationBundle",
    "ExperimentConfig",
    "ExternalModel",
    "IndexEstimateSet",
    "InputSpec",
    "ModelSpec",
    "ModelEvaluationError",
    "NoiseGuardError",
    "NoiseSpec",
    "PickFreezeDesign",
    "ResultTable",
    "SampleMatrix",
    "SingularModelError",
    "SobolNoiseError",
    "TrueIndices",
    "UnknownModelError",
    "analytic_noised_indices",
    "apply_correction",
    "benchmark",
    "bootstrap_variances",
    "budget_to_n",
    "build_pickfreeze",
    "correct_main",
    "correct_total",
    "correction_bias",
    "corrected_variance",
    "emit_csv",
    "estimate_all",
    "estimate_jansen_total",
    "estimate_main",
    "estimate_total_variance",
    "eval_gfunction",
    "eval_linear",
    "eval_steel_column",
    "load_config",
    "noisy_eval",
    "passthrough",
    "run_experiment",
    "run_preset",
    "sample_uniform",
    "true_indices",
]
