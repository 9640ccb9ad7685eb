"""Single-step updates of the iteration schemes."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .config import SolverConfig, SolverState

_LOG_TINY = math.log(1e-300)
_LOG_HUGE = math.log(np.finfo(float).max)


class SolverAbort(RuntimeError):
    """A step produced a non-representable iterate.

    ``trace`` is filled in by :func:`~entroland.solvers.run` with the records
    collected before the failure.
    """

    def __init__(self, message, k=None, trace=None):
        super().__init__(message)
        self.k = k
        self.trace = trace if trace is not None else []


def _multiplicative_update(state: SolverState, op, exponent, direction, cfg: SolverConfig,
                           v_slice=None, block=None) -> SolverState:
    clamp = cfg.exponent_clamp
    n_clamped = int(np.count_nonzero(np.abs(exponent) > clamp))
    e = np.clip(exponent, -clamp, clamp)
    if not np.all(np.isfinite(e)):
        raise SolverAbort(f"non-finite exponent at step {state.k}", k=state.k)
    log_u = state.log_u + e
    ln_c = 0.0
    if cfg.m == 1:
        shift = float(log_u.max())
        mass = op.domain.integrate(np.exp(log_u - shift))
        log_mass = shift + math.log(mass)
        if log_mass < _LOG_TINY:
            raise SolverAbort(f"mass underflow at step {state.k}", k=state.k)
        ln_c = -log_mass
        log_u = log_u + ln_c
    if log_u.max() >= _LOG_HUGE:
        raise SolverAbort(f"iterate overflows at step {state.k}", k=state.k)

    v = state.v_accum.copy()
    if v_slice is None:
        v += direction
    else:
        v[v_slice] += direction
    return replace(
        state,
        k=state.k + 1,
        log_u=log_u,
        v_accum=v,
        log_normalizer_sum=state.log_normalizer_sum + ln_c,
        last_ln_c=ln_c,
        last_clamps=n_clamped,
        clamp_events=state.clamp_events + n_clamped,
        last_block=block,
    )


def entropic_step(state: SolverState, y, op, cfg: SolverConfig) -> SolverState:
    """``u <- c_k u exp(lam A*(y - A u))``, with ``c_k = 1`` for ``m = 0`` and
    the mass normalizer for ``m = 1``.

    The exponent is clipped to ``[-exponent_clamp, exponent_clamp]``; clipped
    nodes are counted in ``last_clamps``.
    """
    r = y - op.apply(state.u)
    new = _multiplicative_update(state, op, cfg.lam * op.adjoint(r), r, cfg)
    new.last_residual = op.range.norm(r)
    return new


def stochastic_entropic_step(state: SolverState, y, blocks, cfg: SolverConfig,
                             J: int | None = None) -> SolverState:
    """Block update ``u <- c_k u exp(lam M A_J*(y_J - A_J u))``.

    ``blocks`` comes from :func:`~entroland.operators.partition_blocks` and
    ``J`` (0-based) is drawn uniformly from the state's generator unless given.
    """
    M = len(blocks)
    if J is None:
        if state.rng is None:
            raise ValueError("stochastic step needs a seeded state (SolverState.initial(seed=...))")
        J = int(state.rng.integers(M))
    sub, sl = blocks[J]
    r = M * (y[sl] - sub.apply(state.u))
    return _multiplicative_update(state, sub, cfg.lam * sub.adjoint(r), r, cfg,
                                  v_slice=sl, block=J)


def general_fidelity_step(state: SolverState, y, op, fid, cfg: SolverConfig) -> SolverState:
    """``u <- c_k u exp(-lam A* F'(A u))`` for a differentiable fidelity ``F``."""
    direction = -fid.gradient(op.apply(state.u), y)
    return _multiplicative_update(state, op, cfg.lam * op.adjoint(direction), direction, cfg)


def em_step(u, y, op) -> np.ndarray:
    """One EM (Richardson-Lucy) update ``u A*(y / A u) / A*1``.

    Defined for nonnegative real kernels and data only.
    """
    if np.iscomplexobj(op.matrix) or np.any(op.matrix < 0):
        raise ValueError("EM needs a nonnegative real kernel")
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("EM needs nonnegative data")
    u = np.asarray(getattr(u, "values", u), dtype=float)
    Au = op.apply(u)
    if np.any((Au <= 0) & (y > 0)):
        raise SolverAbort("EM: forward image vanishes where data is positive")
    ratio = np.zeros_like(y)
    pos = Au > 0
    ratio[pos] = y[pos] / Au[pos]
    sens = op.adjoint(np.ones_like(y))
    if np.any(sens <= 0):
        raise ValueError("EM needs A*1 > 0 on every node")
    return u * op.adjoint(ratio) / sens


def projected_landweber_step(u, y, op, tau_pl: float) -> np.ndarray:
    """``(u - tau A*(A u - y))_+``."""
    if tau_pl <= 0:
        raise ValueError("tau_pl must be positive")
    u = np.asarray(getattr(u, "values", u), dtype=float)
    return np.maximum(0.0, u - tau_pl * op.adjoint(op.apply(u) - y))
