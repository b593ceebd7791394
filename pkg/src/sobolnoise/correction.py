"""Stationary-noise model and the index correction formulas.

A deterministic core g observed through multiplicative and additive
stationary noise, y = (1 + a)*g(x) + b with a, b independent of x and of
each other, inflates every Sobol' index estimate. The variance share of
the noise equals the total index of a virtual input whose only role is
to re-draw the noise; measuring it via a repeated evaluation pass allows
an exact algebraic removal of the inflation:

    main_clean  = main_noised / (1 - noise_total)
    total_clean = (total_noised - noise_total) / (1 - noise_total)

Because the corrections are ratio estimates, first-order bias and
variance propagation formulas are provided alongside.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoiseGuardError
from .estimators import IndexEstimateSet
from .models import ModelSpec, TrueIndices

#: Corrections with a noise share above 1 - DELTA_GUARD are refused:
#: the denominator is too small for the ratio to mean anything.
DELTA_GUARD = 0.01

VARIANCE_FORMS = ("as_printed", "standard_ratio")


def _uniform_moments(bounds: tuple[float, float]) -> tuple[float, float]:
    lo, hi = bounds
    return (lo + hi) / 2.0, (hi - lo) ** 2 / 12.0


@dataclass(frozen=True)
class NoiseSpec:
    """Uniform multiplicative and additive noise bounds.

    Draws are independent of the model inputs, of each other and across
    evaluations. Zero-width bounds give constant (or absent) noise.
    """

    alpha: tuple[float, float]
    beta: tuple[float, float]

    def __post_init__(self) -> None:
        for name, (lo, hi) in (("alpha", self.alpha), ("beta", self.beta)):
            if not lo <= hi:
                raise ValueError(f"{name} bounds must satisfy lower <= upper")

    @property
    def alpha_mean(self) -> float:
        return _uniform_moments(self.alpha)[0]

    @property
    def alpha_var(self) -> float:
        return _uniform_moments(self.alpha)[1]

    @property
    def beta_var(self) -> float:
        return _uniform_moments(self.beta)[1]


@dataclass(frozen=True)
class CorrectedResult:
    """Noise-corrected indices with propagated bias and variance.

    With ``correction_applied`` False (no noise, or correction disabled)
    the corrected fields simply mirror the raw estimates.
    """

    main: np.ndarray
    total: np.ndarray
    bias_main: np.ndarray
    bias_total: np.ndarray
    var_main: np.ndarray
    var_total: np.ndarray
    virtual_total_used: float
    correction_applied: bool


def noisy_eval(
    model: ModelSpec, x: np.ndarray, noise: NoiseSpec, rng: np.random.Generator
) -> float:
    """One noisy evaluation (1 + a)*g(x) + b with fresh draws of a and b.

    Every call consumes new draws, so two calls at the same x differ only
    through the noise: this is exactly the virtual noise variable.
    """
    a = rng.uniform(*noise.alpha)
    b = rng.uniform(*noise.beta)
    return (1.0 + a) * float(model.evaluate(x)) + b


def noisy_eval_batch(
    model: ModelSpec, x: np.ndarray, noise: NoiseSpec, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized noisy evaluation over the rows of an (n, d) matrix."""
    y = np.asarray(model.evaluate(x), dtype=float)
    a = rng.uniform(*noise.alpha, size=y.shape)
    b = rng.uniform(*noise.beta, size=y.shape)
    return (1.0 + a) * y + b


def analytic_noised_indices(
    clean: TrueIndices, variance: float, second_moment: float, noise: NoiseSpec
) -> tuple[np.ndarray, np.ndarray, float]:
    """Predict the indices of the noisy model from clean-model moments.

    With m = (1 + E[a])^2, the noisy output variance is
    m*Var(g) + Var(a)*E[g^2] + Var(b), of which the signal part
    m*Var(g) keeps its conditional-variance structure:

        main_eps  = signal * main
        total_eps = 1 - signal * (1 - total)
        noise_total = 1 - signal,  signal = m*Var(g) / Var(y)
    """
    if variance <= 0:
        raise ValueError("clean-model variance must be positive")
    if second_moment < variance:
        raise ValueError("second moment cannot be below the variance")
    gain = (1.0 + noise.alpha_mean) ** 2
    noisy_variance = gain * variance + noise.alpha_var * second_moment + noise.beta_var
    signal = gain * variance / noisy_variance
    noise_share = 1.0 - signal
    main_eps = signal * clean.main
    # 1 - signal*(1 - T), arranged so zero-width noise is exactly an identity.
    total_eps = noise_share + signal * clean.total
    return main_eps, total_eps, noise_share


def _check_guard(noise_total: float) -> None:
    if noise_total >= 1.0 - DELTA_GUARD:
        raise NoiseGuardError(
            f"noise variance share {noise_total:.4f} leaves no signal to correct"
        )


def correct_main(noised_main, noise_total: float):
    """Noise-free main index: main_noised / (1 - noise_total)."""
    _check_guard(noise_total)
    return noised_main / (1.0 - noise_total)


def correct_total(noised_total, noise_total: float):
    """Noise-free total index: (total_noised - noise_total) / (1 - noise_total)."""
    _check_guard(noise_total)
    return (noised_total - noise_total) / (1.0 - noise_total)


def correction_bias(index_corrected, noise_total_var: float, noise_total: float):
    """First-order ratio-estimator bias, index * Var(noise_total_hat) / (1 - noise_total)^2."""
    _check_guard(noise_total)
    if noise_total_var < 0:
        raise ValueError("variance cannot be negative")
    return index_corrected * noise_total_var / (1.0 - noise_total) ** 2


def corrected_variance(
    var_index,
    index_coeff,
    noise_total_var: float,
    noise_total: float,
    variance_form: str = "as_printed",
):
    """Propagated variance of a corrected index.

    ``as_printed`` keeps the first-power denominator form
    (var + coeff*var_t) / (1 - t); ``standard_ratio`` is the textbook
    delta-method expansion (var + coeff^2*var_t) / (1 - t)^2. The
    coefficient is the corrected main index for main effects and one
    minus the corrected total index for total effects.
    """
    _check_guard(noise_total)
    if variance_form == "as_printed":
        return (var_index + index_coeff * noise_total_var) / (1.0 - noise_total)
    if variance_form == "standard_ratio":
        return (var_index + index_coeff**2 * noise_total_var) / (
            1.0 - noise_total
        ) ** 2
    raise ValueError(f"variance_form must be one of {VARIANCE_FORMS}")


def apply_correction(
    raw: IndexEstimateSet, variance_form: str = "as_printed"
) -> CorrectedResult:
    """Correct a full estimate set using its measured noise total index."""
    if raw.virtual_total is None or raw.var_virtual is None:
        raise ValueError("correction needs the repeated-pass noise total index")
    t = raw.virtual_total
    main = correct_main(raw.main, t)
    total = correct_total(raw.total, t)
    return CorrectedResult(
        main=main,
        total=total,
        bias_main=correction_bias(main, raw.var_virtual, t),
        bias_total=correction_bias(total, raw.var_virtual, t),
        var_main=corrected_variance(
            raw.var_main, main, raw.var_virtual, t, variance_form
        ),
        var_total=corrected_variance(
            raw.var_total, 1.0 - total, raw.var_virtual, t, variance_form
        ),
        virtual_total_used=t,
        correction_applied=True,
    )


def passthrough(raw: IndexEstimateSet) -> CorrectedResult:
    """No-op result for noise-free runs: corrected fields mirror raw ones."""
    zeros = np.zeros_like(raw.main)
    return CorrectedResult(
        main=raw.main,
        total=raw.total,
        bias_main=zeros,
        bias_total=zeros.copy(),
        var_main=raw.var_main,
        var_total=raw.var_total,
        virtual_total_used=0.0,
        correction_applied=False,
    )
