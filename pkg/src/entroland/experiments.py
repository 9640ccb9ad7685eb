"""Test problems: ground truths, data synthesis and JSON problem configs."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .grid import Density, Grid
from .operators import FourierSamplingOperator, fourier_frequencies, make_kernel_operator
from .solvers import Problem

SIGMA2_KERNEL = 0.01
# (mean, std) of the three mixture components
MIXTURE_MEANS = (0.0, -1.0, 0.5)
MIXTURE_STDS = (1.0, 0.1, 0.25)
MIXTURE_COEFFS = {"z1_fourier": (0.1, 0.6, 0.3), "z2_fourier": (0.1, 0.4, 0.5)}
FOURIER_STEP = 9 / (10 * math.sqrt(2 * math.pi))


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GaussianMixtureParams:
    means: tuple
    stds: tuple
    coeffs: tuple

    def __post_init__(self):
        if not len(self.means) == len(self.stds) == len(self.coeffs):
            raise ValueError("mixture parameter lengths differ")
        if any(s <= 0 for s in self.stds):
            raise ValueError("standard deviations must be positive")

    @property
    def total_weight(self) -> float:
        return float(sum(self.coeffs))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for mu, s, c in zip(self.means, self.stds, self.coeffs):
            out += c * np.exp(-((x - mu) ** 2) / (2 * s * s)) / math.sqrt(2 * math.pi * s * s)
        return out


def mixture(which: str) -> GaussianMixtureParams:
    return GaussianMixtureParams(MIXTURE_MEANS, MIXTURE_STDS, MIXTURE_COEFFS[which])


def _gauss(x, mu):
    return np.exp(-((x - mu) ** 2) / (2 * SIGMA2_KERNEL))


def truth_kernel(which: int, grid: Grid) -> Density:
    """Exact solutions of the three integral-equation test problems."""
    x = grid.nodes
    if which in (1, 3):
        vals = _gauss(x, 0.0)
    elif which == 2:
        vals = (1 - 0.9 * _gauss(x, 0.1) - 0.3 * _gauss(x, 0.3) - 0.5 * _gauss(x, 0.5)
                - 0.2 * _gauss(x, 0.7) - 0.7 * _gauss(x, 0.9))
    else:
        raise ValueError(f"kernel truth must be 1, 2 or 3, got {which}")
    return Density(grid, vals)


def band_limited_filter(op: FourierSamplingOperator, f) -> np.ndarray:
    """``Re(2^{-1/2} sum_j (int f e^{-i t xi_j} dt) e^{i x xi_j})`` on the grid,
    with the integrals done by the grid quadrature."""
    f = np.asarray(f, dtype=float)
    spectrum = math.sqrt(2 * math.pi) * op.apply(f)
    phases = np.exp(1j * np.outer(op.domain.nodes, op.freqs))
    return np.real(phases @ spectrum) / math.sqrt(2)


def truth_fourier(which: str, op: FourierSamplingOperator, construction: str = "log",
                  neg_tol: float = 1e-6) -> Density:
    """Ground truths of the Fourier sampling problem.

    ``z2_fourier`` is the raw Gaussian mixture. ``z1_fourier`` is built from
    the band-limited filtering ``f`` of its mixture (:func:`band_limited_filter`):

    * ``construction="log"`` (default): ``z1 = exp(f) / int exp(f)``. Then
      ``1 + ln z1`` lies in the range of the adjoint (constants included,
      through the zero frequency), so the source condition holds exactly on
      the grid and ``z1`` is strictly positive.
    * ``construction="linear"``: ``z1 = f / int f``. This lies in the range of
      the adjoint itself but oscillates below zero around the narrow mixture
      component. Negative parts are floored when their mass is below
      ``neg_tol``; otherwise ``ValueError`` is raised.
    """
    grid = op.domain
    if which == "z2_fourier":
        return Density(grid, mixture(which)(grid.nodes))
    if which != "z1_fourier":
        raise ValueError(f"unknown Fourier truth {which!r}")
    f = band_limited_filter(op, mixture(which)(grid.nodes))
    if construction == "log":
        z = np.exp(f - f.max())
        return Density(grid, z / grid.integrate(z), strict=True)
    if construction != "linear":
        raise ValueError(f"unknown construction {construction!r}")
    z = f / grid.integrate(f)
    neg_mass = grid.integrate(np.maximum(-z, 0.0))
    if neg_mass > 0:
        if neg_mass >= neg_tol:
            raise ValueError(f"filtered truth has negative mass {neg_mass:.3e}")
        z = np.maximum(z, 0.0)
        z = z / grid.integrate(z)
    return Density(grid, z)


def synthesize_data(op, z, sigma: float, seed: int):
    """Exact data ``A z`` plus seeded Gaussian noise of standard deviation ``sigma``.

    Complex samples get independent noise on the real and imaginary parts.
    Returns ``(y_exact, y_noisy, delta)`` with ``delta = ||y_noisy - y_exact||``.
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    z = np.asarray(getattr(z, "values", z), dtype=float)
    y = op.apply(z)
    if sigma == 0:
        return y, y.copy(), 0.0
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sigma, size=y.shape)
    if np.iscomplexobj(y):
        noise = noise + 1j * rng.normal(0.0, sigma, size=y.shape)
    y_noisy = y + noise
    return y, y_noisy, op.range.norm(y_noisy - y)


@dataclass
class ProblemSpec:
    """Serializable description of one test problem and its method defaults.

    ``lambda_step`` is the step size of the entropic update; ``tau_disc`` the
    discrepancy parameter. ``None`` for ``lambda_step`` means ``1/||A||^2``.
    """

    name: str
    operator: dict
    truth: str
    sigma: float = 0.0
    seed: int = 0
    u0: float | None = None
    m: int = 0
    lambda_step: float | None = None
    tau_disc: float = 2.0
    c_ap: float = 1.0
    max_iter: int = 500
    stop: str = "maxiter"
    blocks: int = 1
    block_seed: int = 0
    noise_model: str = "independent real/imag N(0, sigma^2)"
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.sigma < 0:
            raise ConfigError("sigma must be nonnegative")
        if self.stop not in ("discrepancy", "apriori", "maxiter"):
            raise ConfigError(f"unknown stop rule {self.stop!r}")
        kind = self.operator.get("kind")
        if kind not in ("kernel", "fourier"):
            raise ConfigError(f"unknown operator kind {kind!r}")
        if kind == "fourier" and self.truth in ("z1_fourier",) and self.m != 1:
            raise ConfigError("unit-mass Fourier truths are run with m = 1")

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemSpec":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "ProblemSpec":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def build_operator(spec: dict):
    kind = spec["kind"]
    if kind == "kernel":
        return make_kernel_operator(spec["kernel"], int(spec.get("n_in", 512)),
                                    int(spec.get("n_out", spec.get("n_in", 512))))
    a = float(spec.get("a", 10.0))
    grid = Grid(-a, a, int(spec.get("n_grid", 1024)))
    return FourierSamplingOperator(grid, fourier_frequencies(int(spec.get("n_freq", 16))))


def build_truth(name: str, op):
    if name in ("z1_kernel", "z2_kernel", "z3_kernel"):
        return truth_kernel(int(name[1]), op.domain)
    if name in ("z1_fourier", "z2_fourier"):
        return truth_fourier(name, op)
    raise ConfigError(f"unknown truth {name!r}")


def build_problem(spec: ProblemSpec, sigma: float | None = None,
                  seed: int | None = None) -> Problem:
    op = build_operator(spec.operator)
    z = build_truth(spec.truth, op).values
    sigma = spec.sigma if sigma is None else sigma
    seed = spec.seed if seed is None else seed
    y_exact, y, delta = synthesize_data(op, z, sigma, seed)
    grid = op.domain
    if spec.u0 is not None:
        u0 = np.full(grid.n, float(spec.u0))
    elif spec.m == 1:
        u0 = np.full(grid.n, 1.0 / grid.length)
    else:
        u0 = np.ones(grid.n)
    return Problem(op=op, y=y, u0=u0, z=z, y_exact=y_exact, delta=delta, name=spec.name,
                   meta={"sigma": sigma, "seed": seed, "truth": spec.truth})


CONFIG_NAMES = ("kernel1", "kernel2", "kernel3", "fourier_z1_clean", "fourier_z1_noisy",
                "fourier_z2_clean", "fourier_z2_noisy")


def config_path(name: str) -> Path:
    """Path of a bundled config (``kernel1`` or ``kernel1.json``)."""
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in CONFIG_NAMES:
        raise ConfigError(f"no bundled config {name!r}")
    return Path(str(resources.files("entroland") / "configs" / f"{stem}.json"))


def load_spec(path_or_name) -> ProblemSpec:
    p = Path(path_or_name)
    if p.exists():
        return ProblemSpec.load(p)
    return ProblemSpec.load(config_path(str(path_or_name)))
