import math

import numpy as np
import pytest

from entroland import (
    DenseOperator,
    FourierAccumulator,
    FourierSamplingOperator,
    Grid,
    RealGridSpace,
    SolverConfig,
    SolverState,
    entropic_step,
    identity_operator,
    make_kernel_operator,
    partition_blocks,
)
from entroland.grid import GridFunction, GridMismatchError
from entroland.operators import ComplexSpace, EuclideanSpace, fourier_accumulator_step, fourier_frequencies

INV_SQRT_2PI = 1 / math.sqrt(2 * math.pi)


def all_operators():
    rng = np.random.default_rng(3)
    g = Grid(-1.0, 2.0, 37)
    return {
        "k1": make_kernel_operator("k1", 64),
        "k2": make_kernel_operator("k2", 64, 40),
        "k3": make_kernel_operator("k3", 50),
        "fourier": FourierSamplingOperator.default(200),
        "dense-real": DenseOperator(rng.normal(size=(11, g.n)), g, EuclideanSpace(11)),
        "dense-complex": DenseOperator(rng.normal(size=(5, g.n)) + 1j * rng.normal(size=(5, g.n)),
                                       g, ComplexSpace(5)),
        "identity": identity_operator(Grid(0, 1, 23)),
    }


OPS = all_operators()


def random_data(op, rng):
    w = rng.normal(size=op.range.size)
    if isinstance(op.range, ComplexSpace):
        w = w + 1j * rng.normal(size=op.range.size)
    return w


@pytest.mark.parametrize("name", sorted(OPS))
def test_adjoint_consistency(name):
    op = OPS[name]
    rng = np.random.default_rng(11)
    for _ in range(100):
        u = rng.normal(size=op.domain.n)
        w = random_data(op, rng)
        lhs = op.range.inner(op.apply(u), w)
        rhs = op.domain.inner(u, op.adjoint(w))
        assert abs(lhs - rhs) <= 1e-10 * (1 + abs(lhs))


@pytest.mark.parametrize("name", sorted(OPS))
def test_linearity(name):
    op = OPS[name]
    rng = np.random.default_rng(5)
    u, v = rng.normal(size=(2, op.domain.n))
    np.testing.assert_allclose(op.apply(2.5 * u - 0.75 * v), 2.5 * op.apply(u) - 0.75 * op.apply(v),
                               rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("name", sorted(OPS))
def test_norm_estimate_matches_svd(name):
    op = OPS[name]
    sv = np.linalg.svd(op.weighted_matrix(), compute_uv=False)[0]
    assert op.norm_estimate() == pytest.approx(sv, rel=1e-6)


def test_l1_norm_bound_is_attained_by_point_masses():
    op = OPS["k1"]
    g = op.domain
    best = max(op.range.norm(op.apply(np.eye(g.n)[i] / g.weights[i])) for i in range(g.n))
    assert op.l1_norm_bound() == pytest.approx(best, rel=1e-12)


def test_constant_kernel_gives_mass():
    op = make_kernel_operator("k3", 41)
    u = np.exp(op.domain.nodes)
    # k3 row at x = 1 is identically one
    assert op.apply(u)[-1] == pytest.approx(op.domain.integrate(u), rel=1e-14)


def test_fourier_zero_frequency():
    op = FourierSamplingOperator.default(512)
    u = np.full(512, 1 / 20)
    assert op.apply(u)[0] == pytest.approx(INV_SQRT_2PI, rel=1e-12)
    e0 = np.zeros(16, dtype=complex)
    e0[0] = 1.0
    np.testing.assert_allclose(op.adjoint(e0), INV_SQRT_2PI, rtol=1e-14)


def test_fourier_even_function_has_real_samples():
    op = FourierSamplingOperator.default(1001)
    u = np.exp(-op.domain.nodes ** 2)
    assert np.max(np.abs(op.apply(u).imag)) <= 1e-12


def test_fourier_gaussian_matches_refined_quadrature():
    coarse = FourierSamplingOperator.default(1024)
    fine = FourierSamplingOperator(Grid(-10, 10, 4 * 1023 + 1), coarse.freqs)
    g = lambda x: np.exp(-((x - 0.5) ** 2) / (2 * 0.7 ** 2))
    np.testing.assert_allclose(coarse.apply(g(coarse.domain.nodes)), fine.apply(g(fine.domain.nodes)),
                               atol=1e-6)
    # and the closed-form transform of the (numerically untruncated) Gaussian
    xi = coarse.freqs
    exact = 0.7 * np.exp(-0.5 * (0.7 * xi) ** 2 - 0.5j * xi)
    np.testing.assert_allclose(fine.apply(g(fine.domain.nodes)), exact, atol=1e-6)


def test_adjoint_of_zero_is_zero():
    for op in OPS.values():
        assert not np.any(op.adjoint(op.range.zeros()))


def test_kernel_adjoint_matches_transpose():
    op = OPS["k1"]
    rng = np.random.default_rng(0)
    w = rng.normal(size=op.range.size)
    x, y = op.out_grid.nodes, op.domain.nodes
    K = np.exp(np.outer(x, y))
    np.testing.assert_allclose(op.adjoint(w), K.T @ (op.out_grid.weights * w), rtol=1e-12, atol=1e-12)


def test_kernel_values():
    k1 = make_kernel_operator("k1", 9)
    np.testing.assert_allclose(k1.matrix[0], 1.0)
    k2 = make_kernel_operator("k2", 9)
    np.testing.assert_allclose(np.diag(k2.matrix), 3.0)
    k3 = make_kernel_operator("k3", 5)
    np.testing.assert_array_equal(k3.matrix[2], [1, 1, 1, 0, 0])
    with pytest.raises(ValueError):
        make_kernel_operator("k4", 5)


def test_grid_mismatch():
    op = OPS["k1"]
    with pytest.raises(GridMismatchError):
        op.apply(np.ones(3))
    with pytest.raises(GridMismatchError):
        op.apply(GridFunction(Grid(0, 2, op.domain.n), np.ones(op.domain.n)))
    with pytest.raises(GridMismatchError):
        op.adjoint(np.ones(3))
    with pytest.raises(GridMismatchError):
        op.adjoint(np.ones(op.range.size) * 1j)


@pytest.mark.parametrize("M", [1, 3, 4, 16])
def test_block_recomposition(M):
    op = FourierSamplingOperator.default(256)
    rng = np.random.default_rng(M)
    u = rng.random(256)
    w = random_data(op, rng)
    blocks = partition_blocks(op, M)
    assert len(blocks) == M
    np.testing.assert_allclose(np.concatenate([b.apply(u) for b, _ in blocks]), op.apply(u),
                               rtol=0, atol=1e-14)
    np.testing.assert_allclose(sum(b.adjoint(w[sl]) for b, sl in blocks), op.adjoint(w),
                               rtol=0, atol=1e-12)


def test_block_edge_cases():
    op = OPS["k3"]
    (single, sl), = partition_blocks(op, 1)
    np.testing.assert_array_equal(single.matrix, op.matrix)
    rows = partition_blocks(op, op.range.size)
    assert all(b.range.size == 1 for b, _ in rows)
    # weights of the real data space are inherited slice by slice
    np.testing.assert_array_equal(np.concatenate([b.range.weights for b, _ in rows]), op.range.weights)
    uneven = partition_blocks(op, 7)
    assert sum(b.range.size for b, _ in uneven) == op.range.size
    for M in (0, op.range.size + 1):
        with pytest.raises(ValueError):
            partition_blocks(op, M)


def test_accumulator_examples():
    op = FourierSamplingOperator.default(256)
    acc = FourierAccumulator(op)
    assert acc.k == 0 and not np.any(acc.acc)
    u0 = np.full(256, 1 / 20)
    acc1 = fourier_accumulator_step(acc, u0)
    np.testing.assert_array_equal(acc1.acc, op.apply(u0))


@pytest.mark.parametrize("m", [0, 1])
def test_accumulator_closed_form_matches_sequential(m):
    op = FourierSamplingOperator.default(512)
    x = op.domain.nodes
    z = np.exp(-x ** 2 / 2) + 0.2 * np.exp(-(x - 1) ** 2 / 0.1)
    z /= op.domain.integrate(z)
    y = op.apply(z)
    cfg = SolverConfig(m=m, lam=0.3)
    u0 = np.full(512, 1 / 20)
    state = SolverState.initial(op, u0)
    acc = FourierAccumulator(op)
    for _ in range(10):
        acc = acc.step(state.u)
        state = entropic_step(state, y, op, cfg)
    closed = acc.iterate(u0, y, cfg.lam, normalize=(m == 1))
    np.testing.assert_allclose(closed, state.u, rtol=1e-10)


def test_dense_save_load(tmp_path):
    op = OPS["k2"]
    for suffix in (".npy", ".csv"):
        path = tmp_path / f"k2{suffix}"
        op.save(path)
        back = DenseOperator.load(path, op.domain, op.range)
        np.testing.assert_array_equal(back.matrix, op.matrix)
    with pytest.raises(ValueError):
        OPS["fourier"].save(tmp_path / "f.csv")


def test_frequencies():
    np.testing.assert_allclose(fourier_frequencies(16)[:3], [0, np.pi / 8, np.pi / 4])


def test_real_space_requires_matching_weights():
    with pytest.raises(ValueError):
        RealGridSpace(Grid(0, 1, 3), [1.0, 1.0])
