"""Differentiable data fidelities ``F_y(w)`` for the generalized update."""

from __future__ import annotations

import numpy as np


class QuadraticFidelity:
    """``F(w) = 0.5 ||w - y||^2`` in the data-space norm."""

    def __init__(self, space):
        self.space = space

    def value(self, w, y) -> float:
        return 0.5 * self.space.norm(np.asarray(w) - np.asarray(y)) ** 2

    def gradient(self, w, y):
        return np.asarray(w) - np.asarray(y)


class WeightedQuadraticFidelity(QuadraticFidelity):
    """``F(w) = 0.5 sum_j omega_j |w_j - y_j|^2`` (data-space weights included)."""

    def __init__(self, space, omega):
        super().__init__(space)
        self.omega = np.asarray(omega, dtype=float)
        if self.omega.shape != (space.size,) or np.any(self.omega < 0):
            raise ValueError("omega must be a nonnegative vector matching the data space")

    def value(self, w, y) -> float:
        d = np.asarray(w) - np.asarray(y)
        return 0.5 * float(np.sum(self.space.weights * self.omega * np.abs(d) ** 2))

    def gradient(self, w, y):
        return self.omega * (np.asarray(w) - np.asarray(y))
