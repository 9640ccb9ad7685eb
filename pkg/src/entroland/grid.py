"""Uniform 1-D grids with trapezoidal quadrature, and functions living on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class GridMismatchError(ValueError):
    """Two grid functions (or a function and an operator) live on different grids."""


@dataclass(frozen=True)
class Grid:
    """Uniform partition of ``[lower, upper]`` into ``n`` nodes.

    The quadrature weights are those of the composite trapezoidal rule, so
    ``weights.sum() == upper - lower``.
    """

    lower: float
    upper: float
    n: int
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not np.isfinite(self.lower) or not np.isfinite(self.upper):
            raise ValueError("grid bounds must be finite")
        if not self.upper > self.lower:
            raise ValueError(f"need upper > lower, got [{self.lower}, {self.upper}]")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"need at least 2 nodes, got n={self.n}")
        object.__setattr__(self, "n", int(self.n))
        w = np.full(self.n, self.h)
        w[0] = w[-1] = self.h / 2
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def h(self) -> float:
        return (self.upper - self.lower) / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.lower, self.upper, self.n)

    @property
    def length(self) -> float:
        return self.upper - self.lower

    @classmethod
    def from_nodes(cls, nodes) -> "Grid":
        """Rebuild a grid from node positions; only uniform spacings are accepted."""
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("need a 1-D array of at least two nodes")
        grid = cls(float(nodes[0]), float(nodes[-1]), nodes.size)
        if not np.allclose(nodes, grid.nodes, rtol=0, atol=1e-9 * grid.length):
            raise ValueError("non-uniform grids are not supported")
        return grid

    # array-level quadrature, used in the inner loops of the solvers
    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    def inner(self, u, v) -> float:
        return float(np.dot(self.weights, np.asarray(u) * np.asarray(v)))

    def l1_norm(self, u) -> float:
        return float(np.dot(self.weights, np.abs(u)))

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "n": self.n}

    @classmethod
    def from_dict(cls, d) -> "Grid":
        return cls(float(d["lower"]), float(d["upper"]), int(d["n"]))


@dataclass(frozen=True)
class GridFunction:
    """Node values of a function on a :class:`Grid`. Values are copied and frozen."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise GridMismatchError(
                f"expected {self.grid.n} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.grid.n

    def to_csv(self, path) -> None:
        """Write ``node,value`` rows."""
        data = np.column_stack([self.grid.nodes, self.values])
        np.savetxt(path, data, delimiter=",", header="node,value", comments="",
                   fmt="%.17g")

    @classmethod
    def from_csv(cls, path) -> "GridFunction":
        data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
        return cls(Grid.from_nodes(data[:, 0]), data[:, 1])


class Density(GridFunction):
    """Nonnegative grid function.

    With ``strict=True`` the values must additionally be bounded away from
    zero, which is what the multiplicative update needs.
    """

    def __init__(self, grid: Grid, values, strict: bool = False):
        super().__init__(grid, values)
        if np.any(self.values < 0):
            raise ValueError("density values must be nonnegative")
        if strict and not np.all(self.values > 0):
            raise ValueError("density must be strictly positive")

    @property
    def strictly_positive(self) -> bool:
        return bool(np.all(self.values > 0))


def _check_same_grid(u: GridFunction, v: GridFunction) -> None:
    if u.grid != v.grid:
        raise GridMismatchError(f"{u.grid} vs {v.grid}")


def integrate(u: GridFunction) -> float:
    """Trapezoidal approximation of the integral of ``u`` over its grid."""
    return u.grid.integrate(u.values)


def inner(u: GridFunction, v: GridFunction) -> float:
    """Weighted L2 inner product of two functions on the same grid."""
    _check_same_grid(u, v)
    return u.grid.inner(u.values, v.values)


def l1_norm(u: GridFunction) -> float:
    return u.grid.l1_norm(u.values)
