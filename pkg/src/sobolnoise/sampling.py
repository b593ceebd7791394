"""Reproducible pick-freeze Monte Carlo designs.

All randomness flows through counter-based Philox streams keyed by
(master seed, stream id), so any matrix can be regenerated bit-exactly
and distinct streams are statistically independent. The fixed stream
layout per replicate:

    0  base matrix A
    1  base matrix B
    2  noise draws for the main evaluation pass
    3  noise draws for the repeated pass over A (the virtual variable)
    4+ bootstrap resampling
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DesignError
from .models import CONTROLLED, InputSpec

STREAM_A = 0
STREAM_B = 1
STREAM_NOISE = 2
STREAM_REPLICATE = 3
STREAM_BOOTSTRAP = 4

_UINT64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def stream_rng(master_seed: int, stream: int) -> np.random.Generator:
    """Independent generator for the given (master seed, stream id) pair."""
    if master_seed < 0 or stream < 0:
        raise ValueError("seed and stream id must be non-negative")
    key = np.array([master_seed, stream], dtype=np.uint64) & _UINT64
    return np.random.Generator(np.random.Philox(key=key))


def child_seed(master_seed: int, replicate: int) -> int:
    """Well-mixed per-replicate seed derived from the master seed."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(replicate,))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SeedLineage:
    master_seed: int
    stream: int


@dataclass(frozen=True)
class SampleMatrix:
    """An (n, d) block of uniform draws plus the lineage that regenerates it."""

    values: np.ndarray
    inputs: tuple[InputSpec, ...]
    lineage: SeedLineage

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dimension(self) -> int:
        return self.values.shape[1]


def sample_uniform(
    inputs: Sequence[InputSpec], n: int, master_seed: int, stream: int
) -> SampleMatrix:
    """i.i.d. uniform draws per controlled input, scaled to its bounds.

    Deterministic given (master_seed, stream). Virtual-noise inputs are
    skipped: they have no column in the design.
    """
    controlled = tuple(s for s in inputs if s.role == CONTROLLED)
    if n < 2:
        raise DesignError("need at least 2 rows for variance estimation")
    if not controlled:
        raise DesignError("no controlled inputs to sample")
    lower = np.array([s.lower for s in controlled])
    upper = np.array([s.upper for s in controlled])
    rng = stream_rng(master_seed, stream)
    u = rng.random((n, len(controlled)))
    return SampleMatrix(
        values=lower + u * (upper - lower),
        inputs=controlled,
        lineage=SeedLineage(master_seed, stream),
    )


@dataclass(frozen=True)
class PickFreezeDesign:
    """Base matrices A, B and the d column-swapped hybrids.

    ``mixed[i]`` equals A with column i replaced by B's column i;
    ``budget_used`` counts the n*(d+2) evaluations of the design proper,
    before any repeated pass for the virtual noise variable.
    """

    a: SampleMatrix
    b: SampleMatrix
    mixed: tuple[np.ndarray, ...]
    budget_used: int

    @property
    def n(self) -> int:
        return self.a.n

    @property
    def dimension(self) -> int:
        return self.a.dimension


def build_pickfreeze(a: SampleMatrix, b: SampleMatrix) -> PickFreezeDesign:
    """Assemble the full pick-freeze design from two independent bases."""
    if a.values.shape != b.values.shape:
        raise DesignError("base matrices must have the same shape")
    if a.inputs != b.inputs:
        raise DesignError("base matrices must share the same input specs")
    mixed = []
    for i in range(a.dimension):
        m = a.values.copy()
        m[:, i] = b.values[:, i]
        mixed.append(m)
    return PickFreezeDesign(
        a=a, b=b, mixed=tuple(mixed), budget_used=a.n * (a.dimension + 2)
    )


def budget_to_n(budget: int, d: int, noisy: bool) -> int:
    """Rows affordable within an evaluation budget.

    The design costs d+2 evaluations per row (A, B and the d hybrids);
    a noisy study adds one more for the repeated pass over A.
    """
    columns = d + 2 + (1 if noisy else 0)
    n = budget // columns
    if n < 2:
        raise DesignError(
            f"budget {budget} cannot afford 2 rows at {columns} evaluations per row"
        )
    return n
