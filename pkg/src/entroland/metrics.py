"""Entropy, Kullback-Leibler divergence and the surrogate distance ``D``.

Public functions take :class:`~entroland.grid.Density` objects; the
underscore-prefixed array versions are what the solvers call per iteration.
Values of ``+inf`` are returned as ``math.inf``, never NaN.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import GridFunction, _check_same_grid


def _xlogx(s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s, dtype=float)
    pos = s > 0
    out[pos] = s[pos] * np.log(s[pos])
    return out


def _entropy(weights, u) -> float:
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        return math.inf
    return float(np.dot(weights, _xlogx(u)))


def _kl(weights, v, u) -> float:
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(v < 0) or np.any(u < 0):
        return math.inf
    vpos = v > 0
    if np.any(vpos & (u == 0)):
        return math.inf
    terms = u.copy()  # v_i = 0 leaves u_i
    vp, up = v[vpos], u[vpos]
    terms[vpos] = vp * np.log(vp / up) - vp + up
    # the continuum integrand is nonnegative; clip rounding noise below zero
    return max(float(np.dot(weights, terms)), 0.0)


def entropy(u: GridFunction) -> float:
    """Negative Boltzmann-Shannon entropy ``sum_i w_i u_i ln u_i`` (``0 ln 0 = 0``).

    Returns ``inf`` if ``u`` has a negative entry.
    """
    return _entropy(u.grid.weights, u.values)


def kl_divergence(v: GridFunction, u: GridFunction) -> float:
    """Kullback-Leibler divergence ``d(v, u) = sum w (v ln(v/u) - v + u)``.

    Nodes with ``v_i = 0`` contribute ``u_i``; a node with ``v_i > 0`` and
    ``u_i = 0`` makes the divergence infinite.
    """
    _check_same_grid(v, u)
    return _kl(v.grid.weights, v.values, u.values)


def l1_kl_bound_slack(v: GridFunction, u: GridFunction) -> float:
    """Slack of ``||u - v||_1^2 <= (2/3 ||v||_1 + 4/3 ||u||_1) d(v, u)``.

    The returned value is ``rhs - lhs`` and is nonnegative for every pair of
    nonnegative densities.
    """
    _check_same_grid(v, u)
    g = v.grid
    d = _kl(g.weights, v.values, u.values)
    if math.isinf(d):
        return math.inf
    lhs = g.l1_norm(u.values - v.values) ** 2
    return (2 / 3 * g.l1_norm(v.values) + 4 / 3 * g.l1_norm(u.values)) * d - lhs


def _surrogate_D(op, c, u, v, Au=None, Av=None) -> float:
    d = _kl(op.domain.weights, u, v)
    if math.isinf(d):
        return math.inf
    Au = op.apply(u) if Au is None else Au
    Av = op.apply(v) if Av is None else Av
    return c * d - 0.5 * op.range.norm(Au - Av) ** 2


def surrogate_D(u: GridFunction, v: GridFunction, op, c: float) -> float:
    """``D(u, v) = c d(u, v) - 0.5 ||A u - A v||^2``.

    Nonnegative whenever ``c >= gamma**2 / 2`` for a continuity constant
    ``gamma`` of ``op``; callers monitor the sign rather than assume it.
    """
    _check_same_grid(u, v)
    if c <= 0:
        raise ValueError("c must be positive")
    return _surrogate_D(op, c, u.values, v.values)


def continuity_constant(op, norm: str = "l2") -> float:
    """``gamma = sqrt(2) * ||A||``.

    ``norm="l2"`` uses the weighted-L2 operator norm from power iteration.
    ``norm="l1"`` uses the L1 -> Y norm (largest column norm), which is the
    norm for which ``||Au - Av|| <= gamma sqrt(d(u, v))`` is guaranteed on
    unit-mass pairs.
    """
    if norm == "l2":
        return math.sqrt(2) * op.norm_estimate()
    if norm == "l1":
        return math.sqrt(2) * op.l1_norm_bound()
    raise ValueError(f"unknown norm {norm!r}")


__all__ = [
    "continuity_constant",
    "entropy",
    "kl_divergence",
    "l1_kl_bound_slack",
    "surrogate_D",
]
