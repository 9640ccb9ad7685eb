"""Linear forward operators ``A: L1(grid) -> Y`` with their adjoints.

Every operator is backed by a dense matrix ``K`` acting on node values, so
``(A u)_j = sum_i K[j, i] w_i u_i`` with ``w`` the domain quadrature
weights. The data space ``Y`` is either a weighted real grid space or
``C^n`` with the real-part inner product; the adjoint is taken with respect
to those inner products and is always real valued.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import Grid, GridFunction, GridMismatchError


class RealGridSpace:
    """Real functions on a grid with the weighted L2 inner product."""

    dtype = np.float64

    def __init__(self, grid: Grid, weights=None):
        self.grid = grid
        self.weights = grid.weights if weights is None else np.asarray(weights, dtype=float)
        if self.weights.shape != (grid.n,):
            raise ValueError("weights do not match the grid")

    @property
    def size(self) -> int:
        return self.weights.size

    def zeros(self) -> np.ndarray:
        return np.zeros(self.size)

    def check(self, w) -> np.ndarray:
        w = np.asarray(w)
        if w.shape != (self.size,) or np.iscomplexobj(w):
            raise GridMismatchError(
                f"expected a real vector of length {self.size}, got {w.dtype}{w.shape}")
        return w

    def inner(self, a, b) -> float:
        return float(np.dot(self.weights, np.asarray(a) * np.asarray(b)))

    def norm(self, a) -> float:
        return math.sqrt(max(self.inner(a, a), 0.0))

    def restrict(self, sl: slice) -> "RealGridSpace":
        sub = object.__new__(RealGridSpace)
        sub.grid = None
        sub.weights = self.weights[sl]
        return sub

    def describe(self) -> dict:
        if self.grid is not None:
            return {"kind": "real-grid", **self.grid.to_dict()}
        return {"kind": "real-weighted", "n": self.size}


class EuclideanSpace(RealGridSpace):
    """``R^n`` with the plain dot product."""

    def __init__(self, n: int):
        self.grid = None
        self.weights = np.ones(int(n))


class ComplexSpace:
    """``C^n`` with inner product ``Re(sum_j a_j conj(b_j))``."""

    dtype = np.complex128

    def __init__(self, n: int):
        self.n = int(n)
        self.weights = np.ones(self.n)

    @property
    def size(self) -> int:
        return self.n

    def zeros(self) -> np.ndarray:
        return np.zeros(self.n, dtype=complex)

    def check(self, w) -> np.ndarray:
        w = np.asarray(w)
        if w.shape != (self.n,):
            raise GridMismatchError(f"expected a vector of length {self.n}, got {w.shape}")
        return w.astype(complex, copy=False)

    def inner(self, a, b) -> float:
        return float(np.real(np.vdot(np.asarray(b), np.asarray(a))))

    def norm(self, a) -> float:
        a = np.asarray(a)
        return float(np.sqrt(np.sum(a.real ** 2 + a.imag ** 2)))

    def restrict(self, sl: slice) -> "ComplexSpace":
        return ComplexSpace(len(range(*sl.indices(self.n))))

    def describe(self) -> dict:
        return {"kind": "complex", "n": self.n}


class DenseOperator:
    """Operator given by a dense node matrix ``K`` (rows: data, columns: nodes).

    Parameters
    ----------
    matrix : array, shape (m, n)
        ``K[j, i]``; real or complex.
    domain : Grid
        Grid of the unknown; supplies the quadrature weights.
    range_space : RealGridSpace or ComplexSpace
        Data space; must match ``matrix`` in size and type.
    name : str, optional
        Identifier written into run metadata.
    """

    def __init__(self, matrix, domain: Grid, range_space, name: str = "dense"):
        matrix = np.array(matrix)
        if matrix.ndim != 2 or matrix.shape[1] != domain.n:
            raise GridMismatchError(
                f"matrix shape {matrix.shape} does not fit a grid of {domain.n} nodes")
        if matrix.shape[0] != range_space.size:
            raise GridMismatchError("matrix rows do not match the data space")
        if np.iscomplexobj(matrix) and not isinstance(range_space, ComplexSpace):
            raise TypeError("complex matrices need a ComplexSpace range")
        matrix.flags.writeable = False
        self.matrix = matrix
        self.domain = domain
        self.range = range_space
        self.name = name
        self._norm = None
        # weights folded into the matrices once; apply/adjoint are then plain matvecs
        self._fwd = matrix * domain.weights[None, :]
        self._adj = np.conj(matrix).T * range_space.weights[None, :]

    @property
    def shape(self):
        return self.matrix.shape

    def _values(self, u) -> np.ndarray:
        if isinstance(u, GridFunction):
            if u.grid != self.domain:
                raise GridMismatchError(f"{u.grid} vs operator domain {self.domain}")
            return u.values
        u = np.asarray(u, dtype=float)
        if u.shape != (self.domain.n,):
            raise GridMismatchError(
                f"expected {self.domain.n} node values, got shape {u.shape}")
        return u

    def apply(self, u) -> np.ndarray:
        return self._fwd @ self._values(u)

    __call__ = apply

    def adjoint(self, w) -> np.ndarray:
        w = self.range.check(w)
        out = self._adj @ w
        return np.real(out) if np.iscomplexobj(out) else out

    def weighted_matrix(self) -> np.ndarray:
        """Matrix of ``A`` between orthonormalized coordinates; its largest
        singular value is the L2 operator norm.

        The domain is real, so complex rows are split into stacked real and
        imaginary parts.
        """
        W = (np.sqrt(self.range.weights)[:, None] * self.matrix
             * np.sqrt(self.domain.weights)[None, :])
        if np.iscomplexobj(W):
            W = np.vstack([W.real, W.imag])
        return W

    def norm_estimate(self, max_iter: int = 200, rtol: float = 1e-10) -> float:
        """Weighted-L2 operator norm by power iteration on ``A* A``.

        The start vector is the all-ones function plus a linear ramp: fixed,
        so the result is deterministic, and without parity, so odd singular
        vectors on symmetric grids are not missed.
        """
        if self._norm is None:
            x = 1.0 + np.linspace(0.0, 1.0, self.domain.n)
            lam = 0.0
            for _ in range(max_iter):
                y = self.adjoint(self.apply(x))
                new = math.sqrt(self.domain.inner(y, y))
                if new == 0.0:
                    lam = 0.0
                    break
                x = y / new
                done = abs(new - lam) <= rtol * new
                lam = new
                if done:
                    break
            # Rayleigh quotient is second-order accurate in the eigenvector error
            Ax = self.apply(x)
            self._norm = math.sqrt(max(self.range.inner(Ax, Ax), 0.0)
                                   / self.domain.inner(x, x)) if lam > 0 else 0.0
        return self._norm

    def l1_norm_bound(self) -> float:
        """Norm as a map from L1: ``max_i ||K[:, i]||_Y`` (point masses are extremal)."""
        if isinstance(self.range, ComplexSpace):
            cols = np.sqrt(np.sum(np.abs(self.matrix) ** 2, axis=0))
        else:
            cols = np.sqrt(self.range.weights @ (self.matrix ** 2))
        return float(cols.max())

    def rows(self, sl: slice, name=None) -> "DenseOperator":
        return DenseOperator(self.matrix[sl], self.domain, self.range.restrict(sl),
                             name=name or f"{self.name}[{sl.start}:{sl.stop}]")

    def blocks(self, M: int):
        return partition_blocks(self, M)

    def describe(self) -> dict:
        return {"name": self.name, "domain": self.domain.to_dict(),
                "range": self.range.describe()}

    def save(self, path) -> None:
        """Dump ``K`` row-major (data x nodes) as ``.npy`` or ``.csv``."""
        path = Path(path)
        if path.suffix == ".csv":
            if np.iscomplexobj(self.matrix):
                raise ValueError("CSV export supports real matrices only; use .npy")
            np.savetxt(path, self.matrix, delimiter=",", fmt="%.17g")
        else:
            np.save(path, self.matrix)

    @classmethod
    def load(cls, path, domain: Grid, range_space, name=None) -> "DenseOperator":
        path = Path(path)
        if path.suffix == ".csv":
            matrix = np.loadtxt(path, delimiter=",", ndmin=2)
        else:
            matrix = np.load(path)
        return cls(matrix, domain, range_space, name=name or path.stem)


class IntegralKernelOperator(DenseOperator):
    """``(A u)(x) = int k(x, y) u(y) dy`` with ``A*`` into the weighted output grid."""

    def __init__(self, kernel, domain: Grid, out_grid: Grid, name: str = "kernel"):
        x = out_grid.nodes[:, None]
        y = domain.nodes[None, :]
        values = np.asarray(kernel(x, y), dtype=float) * np.ones((out_grid.n, domain.n))
        super().__init__(values, domain, RealGridSpace(out_grid), name=name)
        self.out_grid = out_grid


def identity_operator(grid: Grid, scale: float = 1.0, range_weights=None) -> DenseOperator:
    """``A u = scale * u`` from the grid into itself.

    With the default range weights (the grid's own) the adjoint is also
    ``scale * v``. Passing ``range_weights`` changes the data-space inner
    product, and with it the adjoint.
    """
    space = RealGridSpace(grid, range_weights)
    return DenseOperator(np.diag(scale / grid.weights), grid, space, name="identity")


def kernel_k1(x, y):
    return np.exp(x * y)


def kernel_k2(x, y):
    return 3.0 * np.exp(-((x - y) ** 2) / 0.04)


def kernel_k3(x, y):
    return (x >= y).astype(float)


KERNELS = {"k1": kernel_k1, "k2": kernel_k2, "k3": kernel_k3}


def make_kernel_operator(which: str, n_in: int, n_out: int | None = None,
                         lower: float = 0.0, upper: float = 1.0) -> IntegralKernelOperator:
    """Tabulate one of the three test kernels on uniform grids of ``(0, 1)``."""
    if which not in KERNELS:
        raise ValueError(f"unknown kernel {which!r}; choose from {sorted(KERNELS)}")
    n_out = n_in if n_out is None else n_out
    domain = Grid(lower, upper, n_in)
    out = domain if n_out == n_in else Grid(lower, upper, n_out)
    return IntegralKernelOperator(KERNELS[which], domain, out, name=which)


def fourier_frequencies(n: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


class FourierSamplingOperator(DenseOperator):
    """Samples of the Fourier integral ``(2 pi)^(-1/2) int u(x) e^{-i x xi_j} dx``.

    The adjoint is ``Re((2 pi)^(-1/2) sum_j v_j e^{i x xi_j})``.
    """

    def __init__(self, domain: Grid, freqs, name: str = "fourier"):
        self.freqs = np.asarray(freqs, dtype=float)
        matrix = np.exp(-1j * np.outer(self.freqs, domain.nodes)) / math.sqrt(2 * math.pi)
        super().__init__(matrix, domain, ComplexSpace(self.freqs.size), name=name)

    @classmethod
    def default(cls, n_grid: int = 1024, a: float = 10.0, n_freq: int = 16):
        return cls(Grid(-a, a, n_grid), fourier_frequencies(n_freq))

    def rows(self, sl: slice, name=None):
        sub = FourierSamplingOperator(self.domain, self.freqs[sl],
                                      name=name or f"{self.name}[{sl.start}:{sl.stop}]")
        return sub

    def describe(self) -> dict:
        return {**super().describe(), "freqs": self.freqs.tolist()}


def partition_blocks(op: DenseOperator, M: int):
    """Split ``op`` into ``M`` contiguous row blocks.

    Returns a list of ``(sub_operator, slice)`` pairs; ``slice`` selects the
    matching part of a data vector. When ``M`` does not divide the number of
    rows, the first blocks get one extra row each.
    """
    m = op.range.size
    if not 1 <= M <= m:
        raise ValueError(f"need 1 <= M <= {m}, got M={M}")
    sizes = np.full(M, m // M)
    sizes[: m % M] += 1
    edges = np.concatenate([[0], np.cumsum(sizes)])
    return [(op.rows(slice(int(a), int(b))), slice(int(a), int(b)))
            for a, b in zip(edges[:-1], edges[1:])]


@dataclass
class FourierAccumulator:
    """Running sum ``acc_k = sum_{l<k} A u_l`` for the closed-form iterate.

    With it, ``u_k = cbar * u_0 * exp(lam * A*(k y - acc_k))`` where ``cbar``
    is the product of the normalizers, so each step costs one forward
    evaluation regardless of ``k``.
    """

    op: DenseOperator
    acc: np.ndarray = None
    k: int = 0

    def __post_init__(self):
        if self.acc is None:
            self.acc = self.op.range.zeros()

    def step(self, u_k) -> "FourierAccumulator":
        return FourierAccumulator(self.op, self.acc + self.op.apply(u_k), self.k + 1)

    def log_iterate(self, log_u0, y, lam: float, normalize: bool) -> np.ndarray:
        """``ln u_k`` up to the normalizer; normalized to unit mass if requested."""
        log_u = np.asarray(log_u0) + lam * self.op.adjoint(self.k * np.asarray(y) - self.acc)
        if normalize:
            shift = log_u.max()
            log_u = log_u - (shift + math.log(self.op.domain.integrate(np.exp(log_u - shift))))
        return log_u

    def iterate(self, u0, y, lam: float, normalize: bool) -> np.ndarray:
        return np.exp(self.log_iterate(np.log(u0), y, lam, normalize))


def fourier_accumulator_step(state: FourierAccumulator, u_k) -> FourierAccumulator:
    return state.step(u_k)
