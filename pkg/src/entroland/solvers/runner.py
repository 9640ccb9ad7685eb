"""Driving loop shared by all methods, with per-iteration diagnostics."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from ..metrics import _kl
from ..operators import partition_blocks
from .config import SolverConfig, SolverState
from .fidelity import QuadraticFidelity
from .steps import (
    SolverAbort,
    em_step,
    entropic_step,
    general_fidelity_step,
    projected_landweber_step,
    stochastic_entropic_step,
)
from .stopping import MaxIter, ModifiedDiscrepancy

log = logging.getLogger(__name__)

METHODS = ("entropic", "entropic-prob", "entropic-stochastic", "em",
           "proj-landweber", "general-fidelity")


@dataclass
class Problem:
    """Operator, data and (optionally) the exact solution of ``A u = y``."""

    op: object
    y: np.ndarray
    u0: np.ndarray
    z: np.ndarray | None = None
    y_exact: np.ndarray | None = None
    delta: float = 0.0
    name: str = "problem"
    meta: dict = field(default_factory=dict)


@dataclass
class IterationRecord:
    k: int
    residual: float
    kl_to_truth: float | None
    D_to_truth: float | None
    l1_error: float | None
    mass: float
    ln_ck: float
    clamp_events: int
    D_step: float | None = None
    fidelity: float | None = None

    CSV_FIELDS = ("k", "residual", "kl_to_truth", "D_to_truth", "l1_error", "mass",
                  "ln_ck", "clamp_events")


@dataclass
class RunResult:
    u: np.ndarray
    trace: list
    stop_reason: str
    k_star: int
    config: SolverConfig
    method: str

    @property
    def final(self) -> IterationRecord:
        return self.trace[-1]


class _Recorder:
    """Computes an :class:`IterationRecord` for each iterate."""

    def __init__(self, problem: Problem, cfg: SolverConfig, fid, z):
        self.op = problem.op
        self.y = problem.y
        self.c = cfg.c
        self.fid = fid
        self.z = z
        self.Az = self.op.apply(z) if z is not None else None
        self.w = self.op.domain.weights
        self.prev = None

    def __call__(self, k, u, ln_c=0.0, clamps=0) -> IterationRecord:
        op = self.op
        Au = op.apply(u)
        res = op.range.norm(Au - self.y)
        kl = Dz = l1 = None
        if self.z is not None:
            kl = _kl(self.w, self.z, u)
            Dz = self.c * kl - 0.5 * op.range.norm(self.Az - Au) ** 2
            l1 = op.domain.l1_norm(u - self.z)
        D_step = None
        if self.prev is not None:
            u_prev, Au_prev = self.prev
            D_step = self.c * _kl(self.w, u, u_prev) - 0.5 * op.range.norm(Au - Au_prev) ** 2
        self.prev = (u, Au)
        fval = self.fid.value(Au, self.y) if self.fid is not None else None
        return IterationRecord(k=k, residual=res, kl_to_truth=kl, D_to_truth=Dz,
                               l1_error=l1, mass=op.domain.integrate(u), ln_ck=ln_c,
                               clamp_events=clamps, D_step=D_step, fidelity=fval)


def run(problem: Problem, method: str, stop=None, cfg: SolverConfig | None = None,
        truth=None, fidelity=None, blocks: int = 1, callback=None) -> RunResult:
    """Iterate ``method`` on ``problem`` until ``stop`` fires or ``cfg.max_iter``
    iterates have been recorded.

    Parameters
    ----------
    problem : Problem
    method : str
        One of ``entropic`` (m=0), ``entropic-prob`` (m=1),
        ``entropic-stochastic``, ``em``, ``proj-landweber``,
        ``general-fidelity``. For the last two entropic variants the mode
        is taken from ``cfg.m``.
    stop : stopping rule, optional
        Defaults to ``MaxIter(cfg.max_iter)``.
    truth : array, optional
        Exact solution for the error columns; defaults to ``problem.z``.
    fidelity : optional
        Fidelity object for ``general-fidelity`` (quadratic by default).
    blocks : int
        Number of row blocks for ``entropic-stochastic``.
    callback : callable, optional
        Called with each :class:`IterationRecord`.

    Returns
    -------
    RunResult
        ``trace[k]`` describes ``u_k``; ``k_star`` is the index of the last
        recorded iterate.

    Raises
    ------
    SolverAbort
        With ``trace`` set to the records gathered so far.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    cfg = (cfg or SolverConfig()).resolve(problem.op)
    if method == "entropic":
        cfg = replace(cfg, m=0)
    elif method == "entropic-prob":
        cfg = replace(cfg, m=1)
    stop = stop or MaxIter(cfg.max_iter)
    op, y = problem.op, problem.y
    z = problem.z if truth is None else np.asarray(getattr(truth, "values", truth), dtype=float)

    fid = None
    if method == "general-fidelity":
        fid = fidelity or QuadraticFidelity(op.range)
    elif isinstance(stop, ModifiedDiscrepancy):
        fid = QuadraticFidelity(op.range)
    record = _Recorder(problem, cfg, fid, z)

    multiplicative = method.startswith("entropic") or method == "general-fidelity"
    u = np.asarray(problem.u0, dtype=float).copy()
    if cfg.m == 1 and multiplicative:
        u = u / op.domain.integrate(u)
    state = SolverState.initial(op, u, seed=cfg.seed) if multiplicative else None
    block_list = partition_blocks(op, blocks) if method == "entropic-stochastic" else None

    trace = []
    rec = record(0, u)
    trace.append(rec)
    _notify(callback, rec)
    reason = None
    while True:
        k = rec.k
        if stop.fires(k, rec.residual, rec.fidelity):
            reason = stop.reason
            break
        if k + 1 >= cfg.max_iter:
            reason = "max_iter"
            break
        try:
            if method in ("entropic", "entropic-prob"):
                state = entropic_step(state, y, op, cfg)
            elif method == "entropic-stochastic":
                state = stochastic_entropic_step(state, y, block_list, cfg)
            elif method == "general-fidelity":
                state = general_fidelity_step(state, y, op, fid, cfg)
            elif method == "em":
                u = em_step(u, y, op)
            else:
                u = projected_landweber_step(u, y, op, cfg.tau_pl)
        except SolverAbort as exc:
            exc.trace = trace
            exc.k = k
            raise
        if state is not None:
            u = state.u
            rec = record(k + 1, u, state.last_ln_c, state.last_clamps)
        else:
            rec = record(k + 1, u)
        trace.append(rec)
        _notify(callback, rec)
    log.info("%s stopped at k=%d (%s), residual %.3e", method, rec.k, reason, rec.residual)
    return RunResult(u=u, trace=trace, stop_reason=reason, k_star=rec.k, config=cfg,
                     method=method)


def _notify(callback, rec):
    if callback is not None:
        callback(rec)
