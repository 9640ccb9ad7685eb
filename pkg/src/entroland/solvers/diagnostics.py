"""Checks of the monotonicity and rate behaviour on recorded traces."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Violation:
    check: str
    k: int
    lhs: float
    rhs: float

    def __str__(self):
        return f"{self.check} violated at k={self.k}: {self.lhs:.6e} > {self.rhs:.6e}"


@dataclass
class MonotonicityReport:
    violations: list = field(default_factory=list)
    checked: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def first(self) -> Violation | None:
        return min(self.violations, key=lambda v: v.k) if self.violations else None


def _le(lhs, rhs, rtol):
    return lhs <= rhs + rtol * (1.0 + abs(rhs))


def check_monotonicity(trace, delta: float = 0.0, rtol: float = 1e-9) -> MonotonicityReport:
    """Verify the inequalities that hold along an entropic Landweber run.

    * residual non-increasing;
    * ``D(z, u_{k+1}) <= D(z, u_k)`` whenever ``||y_delta - A u_{k+1}||^2 > delta^2``;
    * ``||y_delta - A u_k||^2 <= delta^2 + 2 D(z, u_0) / k`` for ``k >= 1``;
    * ``0.5 r_{k+1}^2 + D(z, u_{k+1}) + D(u_{k+1}, u_k) <= delta^2/2 + D(z, u_k)``
      (only where the trace carries ``D_step``).

    Each comparison allows ``rtol * (1 + |rhs|)`` of slack.
    """
    if not trace:
        raise ValueError("empty trace")
    if any(r.D_to_truth is None for r in trace):
        raise ValueError("trace has no D(z, u_k) values; run with the truth supplied")
    rep = MonotonicityReport()
    res = np.array([r.residual for r in trace])
    D = np.array([r.D_to_truth for r in trace])
    ks = [r.k for r in trace]
    d2 = delta ** 2
    counts = dict.fromkeys(("residual", "D_fejer", "residual_bound", "three_point"), 0)
    for i in range(1, len(trace)):
        k = ks[i]
        counts["residual"] += 1
        if not _le(res[i], res[i - 1], rtol):
            rep.violations.append(Violation("residual", k, res[i], res[i - 1]))
        if res[i] ** 2 > d2:
            counts["D_fejer"] += 1
            if not _le(D[i], D[i - 1], rtol):
                rep.violations.append(Violation("D_fejer", k, D[i], D[i - 1]))
        if k >= 1:
            counts["residual_bound"] += 1
            bound = d2 + 2 * D[0] / k
            if not _le(res[i] ** 2, bound, rtol):
                rep.violations.append(Violation("residual_bound", k, res[i] ** 2, bound))
        step = trace[i].D_step
        if step is not None:
            counts["three_point"] += 1
            lhs = 0.5 * res[i] ** 2 + D[i] + step
            rhs = 0.5 * d2 + D[i - 1]
            if not _le(lhs, rhs, rtol):
                rep.violations.append(Violation("three_point", k, lhs, rhs))
    rep.checked = counts
    return rep


def fit_rate(trace, k_min: int, k_max: int, key: str = "kl_to_truth") -> float:
    """Least-squares slope of ``ln trace[key]`` against ``ln k`` on ``[k_min, k_max]``."""
    pts = [(r.k, getattr(r, key)) for r in trace if k_min <= r.k <= k_max]
    if len(pts) < 5:
        raise ValueError(f"need at least 5 points in [{k_min}, {k_max}], got {len(pts)}")
    k, d = np.array(pts, dtype=float).T
    if np.any(k <= 0) or np.any(~(d > 0)):
        raise ValueError(f"{key} and k must be positive on the fit window")
    slope, _ = np.polyfit(np.log(k), np.log(d), 1)
    return float(slope)


def fit_loglog(x, y) -> float:
    """Slope of ``ln y`` against ``ln x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("need at least two positive points")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])
