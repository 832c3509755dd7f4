"""Causal derivative estimates for signals the controller cannot measure directly."""
from __future__ import annotations

import numpy as np

DEFAULT_TAU = 2e-3


class DerivativeEstimator:
    """Backward difference followed by a discrete first-order low-pass.

    The first sample only primes the filter and yields a zero derivative.
    """

    def __init__(self, dt: float, tau: float = DEFAULT_TAU, size: int = 3):
        if dt <= 0 or tau < 0:
            raise ValueError("dt must be positive and tau non-negative")
        self.dt = dt
        self.tau = tau
        self.alpha = tau / (tau + dt)
        self.size = size
        self.reset()

    def reset(self):
        self._prev = None
        self._value = np.zeros(self.size)

    @property
    def value(self) -> np.ndarray:
        return self._value.copy()

    def update(self, x) -> np.ndarray:
        x = np.array(x, dtype=float).reshape(self.size)
        if self._prev is not None:
            raw = (x - self._prev) / self.dt
            self._value = self.alpha * self._value + (1.0 - self.alpha) * raw
        self._prev = x
        return self._value.copy()
