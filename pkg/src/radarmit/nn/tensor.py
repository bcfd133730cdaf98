"""Parameter container and finite-value guards for the NN kernel."""

from __future__ import annotations

import numpy as np


class Tensor:
    """A learnable array with a same-shape gradient accumulator."""

    __slots__ = ("data", "grad")

    def __init__(self, data: np.ndarray):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = np.zeros_like(self.data)

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def zero_grad(self) -> None:
        self.grad[...] = 0.0


def check_finite(name: str, arr: np.ndarray) -> np.ndarray:
    """Raise if arr contains NaN/Inf; returns arr for chaining."""
    if not np.isfinite(arr).all():
        raise FloatingPointError(f"non-finite values in {name}")
    return arr
