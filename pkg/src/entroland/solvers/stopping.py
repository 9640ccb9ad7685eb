"""Stopping rules. Each rule answers ``fires(k, residual, fidelity)`` for the
iterate with index ``k``; the runner stops at the first index where it does."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Discrepancy:
    """First ``k`` with ``||A u_k - y_delta|| < sqrt(tau) * delta`` (strict)."""

    tau: float
    delta: float

    def __post_init__(self):
        if not self.tau > 1:
            raise ValueError("tau must exceed 1")
        if not self.delta > 0:
            raise ValueError("the discrepancy rule needs delta > 0")

    @property
    def threshold(self) -> float:
        return math.sqrt(self.tau) * self.delta

    def fires(self, k, residual, fidelity=None) -> bool:
        return residual < self.threshold

    reason = "discrepancy"


@dataclass(frozen=True)
class APriori:
    """Stop at the fixed index ``ceil(c_ap / delta)``."""

    c_ap: float
    delta: float

    def __post_init__(self):
        if not (self.delta > 0 and self.c_ap > 0):
            raise ValueError("a-priori rule needs c_ap > 0 and delta > 0")

    @property
    def index(self) -> int:
        return math.ceil(self.c_ap / self.delta)

    def fires(self, k, residual, fidelity=None) -> bool:
        return k >= self.index

    reason = "apriori"


@dataclass(frozen=True)
class MaxIter:
    """Record ``K`` iterates ``u_0 .. u_{K-1}``."""

    K: int

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be at least 1")

    def fires(self, k, residual, fidelity=None) -> bool:
        return k >= self.K - 1

    reason = "max_iter"


@dataclass(frozen=True)
class ModifiedDiscrepancy:
    """First ``k`` with ``F(A u_k) < delta`` for a general fidelity ``F``."""

    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    def fires(self, k, residual, fidelity=None) -> bool:
        if fidelity is None:
            raise ValueError("modified discrepancy needs the fidelity value")
        return fidelity < self.delta

    reason = "modified_discrepancy"
