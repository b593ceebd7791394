"""Subprocess protocol for driving external black-box models.

The external command receives one comma-separated input vector per line
on standard input and must print one decimal output per line on standard
output, in order. A nonzero exit status, unparseable output or a line
count mismatch is reported as a model evaluation failure.
"""

from __future__ import annotations

import subprocess
from typing import Sequence

import numpy as np

from .errors import ModelEvaluationError


class ExternalModel:
    """Callable wrapper around an external line-protocol model command."""

    def __init__(self, command: Sequence[str]):
        if not command:
            raise ValueError("external model command must not be empty")
        self.command = tuple(str(c) for c in command)

    def __call__(self, x: np.ndarray) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        batch = np.atleast_2d(x)
        payload = "\n".join(",".join(repr(float(v)) for v in row) for row in batch) + "\n"
        try:
            proc = subprocess.run(
                self.command,
                input=payload,
                capture_output=True,
                text=True,
                check=False,
            )
        except OSError as exc:
            raise ModelEvaluationError(f"cannot launch {self.command[0]!r}: {exc}") from exc
        if proc.returncode != 0:
            tail = proc.stderr.strip().splitlines()[-1:] or ["no stderr"]
            raise ModelEvaluationError(
                f"external model exited with status {proc.returncode}: {tail[0]}"
            )
        lines = proc.stdout.split()
        if len(lines) != batch.shape[0]:
            raise ModelEvaluationError(
                f"expected {batch.shape[0]} output lines, got {len(lines)}"
            )
        try:
            y = np.array([float(s) for s in lines])
        except ValueError as exc:
            raise ModelEvaluationError(f"unparseable model output: {exc}") from exc
        return float(y[0]) if single else y
