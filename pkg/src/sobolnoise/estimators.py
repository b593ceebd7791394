"""Pick-freeze Sobol' index estimators with bootstrap sampling variances.

Main effects use the B*(A_B^i - A) correlation form, totals the Jansen
squared-difference form; both share one pooled variance estimate so the
two numerators live on a common scale. Applied to a repeated noisy pass
over A's rows, the Jansen form also estimates the total index of the
noise itself (identical inputs, fresh noise).

Raw estimates are deliberately not clamped to [0, 1]: downstream
correction arithmetic needs them as-is, clamping is a presentation
decision for reports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModelError, DesignError, ModelEvaluationError
from .sampling import STREAM_BOOTSTRAP, PickFreezeDesign, stream_rng

#: Pooled variance below this fraction of the mean square counts as a
#: constant output (allows for accumulated rounding in the deviations).
_DEGENERACY_REL_TOL = 1e-24


@dataclass(frozen=True)
class EvaluationBundle:
    """Model outputs over a pick-freeze design.

    ``y_replicate``, when present, is a second independent noisy
    evaluation of A's rows: identical inputs, fresh noise draws.
    """

    y_a: np.ndarray
    y_b: np.ndarray
    y_mixed: tuple[np.ndarray, ...]
    y_replicate: np.ndarray | None = None

    def __post_init__(self) -> None:
        vectors = [self.y_a, self.y_b, *self.y_mixed]
        if self.y_replicate is not None:
            vectors.append(self.y_replicate)
        n = self.y_a.shape[0]
        if n < 2:
            raise DesignError("need at least 2 evaluations per vector")
        for v in vectors:
            if v.ndim != 1 or v.shape[0] != n:
                raise DesignError("all evaluation vectors must share the same length")
            if not np.all(np.isfinite(v)):
                raise ModelEvaluationError("model returned non-finite output")

    @property
    def n(self) -> int:
        return self.y_a.shape[0]

    @property
    def dimension(self) -> int:
        return len(self.y_mixed)


@dataclass(frozen=True)
class IndexEstimateSet:
    """Raw index estimates plus their bootstrap sampling variances."""

    main: np.ndarray
    total: np.ndarray
    virtual_total: float | None
    total_variance: float
    var_main: np.ndarray
    var_total: np.ndarray
    var_virtual: float | None
    n: int


def estimate_total_variance(y_a: np.ndarray, y_b: np.ndarray) -> float:
    """Population variance (divide by 2n) of the pooled A and B outputs."""
    if len(y_a) < 2 or len(y_a) != len(y_b):
        raise DesignError("y_a and y_b must share a common length of at least 2")
    pooled = np.concatenate([y_a, y_b])
    variance = float(np.mean((pooled - pooled.mean()) ** 2))
    if variance <= _DEGENERACY_REL_TOL * float(np.mean(pooled**2)):
        raise DegenerateModelError("constant model output, indices undefined")
    return variance


def estimate_main(
    y_a: np.ndarray, y_b: np.ndarray, y_mixed_i: np.ndarray, total_variance: float
) -> float:
    """Main-effect estimate mean(yB * (yMixed_i - yA)) / D.

    yB is centered on the pooled A/B mean so the estimate is invariant
    under a constant shift of all outputs, matching the difference-based
    total estimator.
    """
    if total_variance <= 0:
        raise DesignError("total variance must be positive")
    if len(y_a) != len(y_b) or len(y_a) != len(y_mixed_i):
        raise DesignError("evaluation vectors must share the same length")
    center = np.concatenate([y_a, y_b]).mean()
    return float(np.mean((y_b - center) * (y_mixed_i - y_a)) / total_variance)


def estimate_jansen_total(
    y_a: np.ndarray, y_other: np.ndarray, total_variance: float
) -> float:
    """Jansen total-effect estimate mean((yA - yOther)^2) / (2 D).

    With yOther a column-swapped hybrid this is the total index of the
    swapped variable; with yOther a fresh-noise repeat of A it is the
    total index of the noise.
    """
    if total_variance <= 0:
        raise DesignError("total variance must be positive")
    if len(y_a) != len(y_other):
        raise DesignError("evaluation vectors must share the same length")
    return float(np.mean((y_a - y_other) ** 2) / (2.0 * total_variance))


def _resampled_estimates(
    bundle: EvaluationBundle, idx: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Index estimates for each bootstrap resample (rows of ``idx``).

    Returns (main, total, virtual) with shapes (r, d), (r, d), (r,).
    Degenerate resamples (zero pooled variance) yield zero estimates.
    """
    shift = np.concatenate([bundle.y_a, bundle.y_b]).mean()
    y_a = bundle.y_a[idx] - shift
    y_b = bundle.y_b[idx] - shift
    pooled = np.concatenate([y_a, y_b], axis=1)
    center = pooled.mean(axis=1, keepdims=True)
    d_hat = np.mean(pooled**2, axis=1) - center[:, 0] ** 2
    ok = d_hat > 0
    safe = np.where(ok, d_hat, 1.0)

    d = bundle.dimension
    main = np.empty((idx.shape[0], d))
    total = np.empty((idx.shape[0], d))
    for i in range(d):
        y_m = bundle.y_mixed[i][idx] - shift
        main[:, i] = np.mean((y_b - center) * (y_m - y_a), axis=1) / safe
        total[:, i] = np.mean((y_a - y_m) ** 2, axis=1) / (2.0 * safe)
    main[~ok] = 0.0
    total[~ok] = 0.0

    virtual = None
    if bundle.y_replicate is not None:
        y_r = bundle.y_replicate[idx] - shift
        virtual = np.where(ok, np.mean((y_a - y_r) ** 2, axis=1) / (2.0 * safe), 0.0)
    return main, total, virtual


def bootstrap_variances(
    bundle: EvaluationBundle, resamples: int, seed: int
) -> tuple[np.ndarray, np.ndarray, float | None]:
    """Bootstrap sampling variances of every index estimate.

    Rows are resampled with replacement jointly across all vectors of the
    bundle, so the pairing between A, B, hybrid and repeat evaluations is
    preserved; each resample re-runs the full estimation including the
    pooled variance.
    """
    if resamples < 2:
        raise DesignError("need at least 2 bootstrap resamples")
    rng = stream_rng(seed, STREAM_BOOTSTRAP)
    idx = rng.integers(0, bundle.n, size=(resamples, bundle.n))
    main, total, virtual = _resampled_estimates(bundle, idx)
    var_main = main.var(axis=0, ddof=1)
    var_total = total.var(axis=0, ddof=1)
    var_virtual = float(virtual.var(ddof=1)) if virtual is not None else None
    return var_main, var_total, var_virtual


def estimate_all(
    design: PickFreezeDesign,
    bundle: EvaluationBundle,
    resamples: int = 100,
    seed: int = 0,
) -> IndexEstimateSet:
    """Full estimation pass: indices, pooled variance and bootstrap variances."""
    if bundle.n != design.n or bundle.dimension != design.dimension:
        raise DesignError("evaluation bundle does not match the design")
    total_variance = estimate_total_variance(bundle.y_a, bundle.y_b)
    main = np.array(
        [
            estimate_main(bundle.y_a, bundle.y_b, y_m, total_variance)
            for y_m in bundle.y_mixed
        ]
    )
    total = np.array(
        [
            estimate_jansen_total(bundle.y_a, y_m, total_variance)
            for y_m in bundle.y_mixed
        ]
    )
    virtual_total = None
    if bundle.y_replicate is not None:
        virtual_total = estimate_jansen_total(
            bundle.y_a, bundle.y_replicate, total_variance
        )
    var_main, var_total, var_virtual = bootstrap_variances(bundle, resamples, seed)
    return IndexEstimateSet(
        main=main,
        total=total,
        virtual_total=virtual_total,
        total_variance=total_variance,
        var_main=var_main,
        var_total=var_total,
        var_virtual=var_virtual,
        n=bundle.n,
    )
