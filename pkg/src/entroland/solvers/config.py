from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class SolverConfig:
    """Parameters shared by all iteration schemes.

    ``lam`` is the step size and ``c = 1 / lam`` the weight of the KL term.
    Leave ``lam`` as ``None`` to pick ``1 / ||A||^2`` from the operator
    (see :meth:`resolve`).
    """

    m: int = 0
    lam: float | None = None
    max_iter: int = 1000
    exponent_clamp: float = 500.0
    tau: float = 2.0
    c_ap: float = 1.0
    tau_pl: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.m not in (0, 1):
            raise ValueError(f"mode m must be 0 or 1, got {self.m}")
        if self.lam is not None and not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"step size must be positive, got {self.lam}")
        if not self.tau > 1:
            raise ValueError(f"discrepancy parameter tau must exceed 1, got {self.tau}")
        if not self.exponent_clamp > 0:
            raise ValueError("exponent_clamp must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.c_ap <= 0:
            raise ValueError("c_ap must be positive")
        if self.tau_pl is not None and self.tau_pl <= 0:
            raise ValueError("tau_pl must be positive")

    @classmethod
    def from_c(cls, c: float, **kw) -> "SolverConfig":
        return cls(lam=1.0 / c, **kw)

    @property
    def c(self) -> float:
        if self.lam is None:
            raise ValueError("step size not resolved; call resolve(op) first")
        return 1.0 / self.lam

    def resolve(self, op) -> "SolverConfig":
        """Fill in the default step ``1/||A||^2`` (and the same for ``tau_pl``)."""
        norm2 = op.norm_estimate() ** 2
        return replace(self,
                       lam=self.lam if self.lam is not None else 1.0 / norm2,
                       tau_pl=self.tau_pl if self.tau_pl is not None else 1.0 / norm2)


@dataclass
class SolverState:
    """Iterate of a multiplicative scheme, kept in log space.

    ``v_accum`` is ``w0 + sum_j (y - A u_j)`` (scaled by the block factor in
    the stochastic variant), ``log_normalizer_sum`` is ``sum_j ln c_j``.
    The random generator is advanced in place by the stochastic step.
    """

    k: int
    log_u: np.ndarray
    v_accum: np.ndarray
    w0: np.ndarray
    log_u0: np.ndarray
    log_normalizer_sum: float = 0.0
    last_ln_c: float = 0.0
    last_residual: float = math.nan
    last_clamps: int = 0
    clamp_events: int = 0
    last_block: int | None = None
    rng: np.random.Generator | None = field(default=None, repr=False)

    @property
    def u(self) -> np.ndarray:
        return np.exp(self.log_u)

    @classmethod
    def initial(cls, op, u0, seed: int | None = None, w0=None) -> "SolverState":
        u0 = np.asarray(getattr(u0, "values", u0), dtype=float)
        if u0.shape != (op.domain.n,):
            raise ValueError("initial iterate does not match the operator domain")
        if not np.all(u0 > 0):
            raise ValueError("initial iterate must be strictly positive")
        w0 = op.range.zeros() if w0 is None else op.range.check(w0).copy()
        log_u0 = np.log(u0)
        rng = None if seed is None else np.random.Generator(np.random.Philox(seed))
        return cls(k=0, log_u=log_u0.copy(), v_accum=w0.copy(), w0=w0, log_u0=log_u0, rng=rng)
