"""Symbols, multiplier matrices, A2 weights, weighted norms and sigma^xi."""

import numpy as np
import pytest
from scipy.special import k0, k1

from axbriesz import multiplier as mp
from axbriesz.group import GridSpec, SampledFunction
from axbriesz.riesz import KernelId

XI = np.array([2.0 ** -4, 0.3, 1.0, 2.5, 6.0])


def test_symbol_closed_forms_n1():
    # Fourier transforms of (1+x^2)^{-3/2} and x(1+x^2)^{-3/2}
    np.testing.assert_allclose(mp.symbol_S(1, (0,), 0, XI), 2 * XI * k1(XI), rtol=1e-6, atol=1e-9)
    np.testing.assert_allclose(mp.symbol_S(1, (0,), 1, XI), -2j * XI * k0(XI), rtol=1e-6, atol=1e-9)
    # xi d/dxi of 2 xi K1(xi)
    np.testing.assert_allclose(mp.symbol_S(1, (1,), 0, XI), -2 * XI ** 2 * k0(XI), rtol=1e-6, atol=1e-9)


def test_symbol_radial_n2():
    # int (1+|x|^2)^{-2} e^{-i xi.x} dx = pi |xi| K1(|xi|)
    pts = XI[:, None] * np.array([0.6, 0.8])[None, :]
    np.testing.assert_allclose(mp.symbol_S(2, (0, 0), 0, pts), np.pi * XI * k1(XI), rtol=1e-5, atol=1e-8)


def test_symbol_at_zero():
    assert mp.symbol_S(1, (0,), 0, 0.0) == pytest.approx(2.0, rel=1e-8)
    for n in (1, 2):
        for j in range(1, n + 1):
            for alpha in ([(0,), (1,)] if n == 1 else [(0, 0), (1, 0), (0, 1), (1, 1)]):
                zero = np.zeros(n) if n > 1 else 0.0
                assert abs(mp.symbol_S(n, alpha, j, zero)) <= 1e-8


@pytest.mark.parametrize("j,alpha", [(0, (0,)), (1, (0,)), (1, (1,))])
def test_symbol_conjugate_symmetry(j, alpha):
    a = mp.symbol_S(1, alpha, j, XI)
    b = mp.symbol_S(1, alpha, j, -XI)
    np.testing.assert_allclose(b, np.conj(a), atol=1e-14)


def test_symbol_decay_envelope():
    t = 2.0 ** np.linspace(-6, 6, 49)
    s = np.abs(mp.symbol_S(1, (0,), 1, t))
    C = np.max(s / np.minimum(t, 1 / t) ** 0.5)
    assert np.isfinite(C) and C < 10


def test_symbol_validation():
    with pytest.raises(ValueError):
        mp.symbol_function(1, 0, (2,))
    with pytest.raises(ValueError):
        mp.symbol_function(4, 0, (0, 0, 0, 0))
    sf = mp.symbol_function(2, 1, (0, 0), (1.0, 0.0))
    with pytest.raises(ValueError):
        sf(np.array([[0.0, 1.0]]))


GRID = mp.UGrid(-4.05, 4.05, 81)        # nodes -4.0, -3.9, ..., 4.0


def test_operator_support_patterns():
    Hj = mp.build_multiplier_operator(KernelId(1, 1, "Kj"), 1.0, (0,), GRID).kernel_matrix
    H0 = mp.build_multiplier_operator(KernelId(1, 0, "K0"), 1.0, (0,), GRID).kernel_matrix
    u = GRID.nodes
    d = u[:, None] - u[None, :]
    assert np.all(Hj[d > -1 + 1e-9] == 0)
    assert np.all(H0[np.abs(d) < 1 - 1e-9] == 0)
    assert np.all(H0[d < 0] == 0)
    assert np.count_nonzero(Hj) > 0


def test_operator_spot_value():
    H = mp.build_multiplier_operator(KernelId(1, 1, "Kj"), 1.0, (0,), GRID).kernel_matrix
    i, k = 20, 40                      # u = -2, u' = 0
    assert GRID.nodes[i] == pytest.approx(-2) and GRID.nodes[k] == pytest.approx(0)
    assert H[i, k] == pytest.approx(mp.symbol_S(1, (0,), 1, 1.0) / -2.0, rel=1e-12)
    assert H[k, i] == 0


def test_operator_errors():
    with pytest.raises(ValueError):
        mp.build_multiplier_operator(KernelId(1, 1, "Kj"), 0.0, (0,), GRID)
    with pytest.raises(ValueError):
        mp.build_multiplier_operator(KernelId(1, 1, "R"), 1.0, (0,), GRID)
    with pytest.raises(ValueError):
        mp.IntegralOperator1D(GRID, np.full((81, 81), np.nan))


def test_operator_is_immutable_and_linear(rng):
    op = mp.build_multiplier_operator(KernelId(1, 0, "K0"), 0.7, (1,), GRID)
    with pytest.raises(ValueError):
        op.kernel_matrix[0, 0] = 1.0
    f, g = rng.normal(size=81), rng.normal(size=81)
    np.testing.assert_allclose(op.apply(2 * f - g), 2 * op.apply(f) - op.apply(g), atol=1e-12)


@pytest.mark.parametrize("variant,j,xi,v", [("Kj", 1, 1.0, 1.0), ("K0", 0, 0.5, 2.0), ("Kj", 1, 2.0, 0.0)])
def test_scaling_covariance(variant, j, xi, v):
    res = mp.scaling_covariance_check(KernelId(1, j, variant), xi, v, GRID)
    assert res <= 1e-10
    if v == 0:
        assert res == 0.0


def test_scaling_covariance_needs_alignment():
    with pytest.raises(ValueError):
        mp.scaling_covariance_check(KernelId(1, 1, "Kj"), 1.0, 0.05, GRID)


def test_a2_constant_is_one():
    assert mp.a2_characteristic(mp.MuckenhouptWeight(GRID)) == 1.0
    assert mp.MuckenhouptWeight(GRID).inverse().a2_estimate == 1.0


def test_a2_power_weights():
    a = [mp.MuckenhouptWeight(mp.UGrid(-10, 10, nu), ("power", 0.5)).a2_estimate for nu in (400, 800)]
    assert a[0] >= 1
    assert a[1] == pytest.approx(a[0], rel=0.05)
    grow = [mp.MuckenhouptWeight(mp.UGrid(-L, L, 40 * L), ("power", 0.999)).a2_estimate for L in (10, 20, 40)]
    assert grow[0] < grow[1] < grow[2]


def test_weight_validation():
    with pytest.raises(ValueError):
        mp.MuckenhouptWeight(GRID, ("power", -1.5))
    with pytest.raises(ValueError):
        mp.MuckenhouptWeight(GRID, ("samples", -np.ones(81)))


@pytest.mark.parametrize("desc", ["constant", ("power", 0.5), ("power", -0.5)])
def test_opnorm_identity(desc):
    op = mp.IntegralOperator1D(GRID, np.eye(81) / GRID.du)
    w = mp.MuckenhouptWeight(GRID, desc)
    for method in ("lanczos", "power", "dense"):
        assert mp.weighted_opnorm(op, w, method=method) == pytest.approx(1.0, rel=1e-8)


def test_opnorm_rank_one(rng):
    u = GRID.nodes
    g, h = np.exp(-u ** 2), np.cos(u) / (1 + u ** 2)
    w = mp.MuckenhouptWeight(GRID, ("power", 0.5))
    q = GRID.weights
    want = np.sqrt(np.sum(g ** 2 * w.samples * q)) * np.sqrt(np.sum(h ** 2 / w.samples * q))
    op = mp.IntegralOperator1D(GRID, np.outer(g, h))
    assert mp.weighted_opnorm(op, w) == pytest.approx(want, rel=1e-6)
    assert mp.weighted_opnorm(op, w, method="power") == pytest.approx(want, rel=1e-6)


def test_opnorm_methods_agree():
    op = mp.build_multiplier_operator(KernelId(1, 1, "Kj"), 1.0, (0,), GRID)
    w = mp.MuckenhouptWeight(GRID, ("power", -0.5))
    d = mp.weighted_opnorm(op, w, method="dense")
    assert mp.weighted_opnorm(op, w) == pytest.approx(d, rel=1e-8)
    assert mp.weighted_opnorm(op, w, method="power", tol=1e-10) == pytest.approx(d, rel=1e-6)
    with pytest.raises(mp.ConvergenceError):
        mp.weighted_opnorm(op, w, method="power", max_iter=1)
    with pytest.raises(ValueError):
        mp.weighted_opnorm(op, w, method="qr")


def test_opnorm_refinement_Kj():
    a = mp.weighted_opnorm(mp.build_multiplier_operator(KernelId(1, 1, "Kj"), 1.0, (0,),
                                                        mp.UGrid(-20, 20, 800)))
    b = mp.weighted_opnorm(mp.build_multiplier_operator(KernelId(1, 1, "Kj"), 1.0, (0,),
                                                        mp.UGrid(-40, 40, 1600)))
    assert np.isfinite(a) and b == pytest.approx(a, rel=0.05)


def test_z_kernels():
    g = mp.UGrid(-20, 20, 400)
    w = mp.MuckenhouptWeight(g, ("power", 0.5))
    z = mp.model_kernel_opnorm("Zeps", 0.5, w)
    zs = mp.model_kernel_opnorm("ZepsStar", 0.5, w.inverse())
    assert z == pytest.approx(zs, rel=1e-8)
    one = mp.MuckenhouptWeight(g)
    assert mp.model_kernel_opnorm("Zeps", 0.5, one) <= mp.schur_bound(mp.model_kernel("Zeps", g, 0.5))
    with pytest.raises(ValueError):
        mp.model_kernel("Zeps", g)
    with pytest.raises(ValueError):
        mp.model_kernel("V", g)


def test_w_kernel_below_schur():
    g = mp.UGrid(-40, 40, 800)
    n = mp.model_kernel_opnorm("W", None, mp.MuckenhouptWeight(g))
    assert n <= mp.schur_bound_W(g)
    assert n <= mp.w_continuum_norm()


def _k_grid():
    return GridSpec((-8.0,), (8.0,), (321,), -1.0, 1.0, 41)


def test_representation_approximate_identity():
    g = _k_grid()
    pg = mp.UGrid(-6.0, 4.0, 200)              # du = 0.05 as on the kernel grid
    w = 0.05
    K = SampledFunction.from_callable(g, lambda x, u: np.exp(-(x[..., 0] ** 2 + u ** 2) / (2 * w * w)))
    K = SampledFunction(g, K.values / K.integral())
    s = pg.nodes
    phi = np.exp(-(s + 2) ** 2)
    out = mp.representation_apply(K, np.array([1.0]), pg, phi)
    assert np.max(np.abs(out - phi)) <= 1e-2


def test_representation_separable_kernel():
    # K = g(x) delta(u) gives s -> g^(e^s xi) phi(s)
    g = _k_grid()
    vals = np.zeros(g.shape)
    iu = 20                                     # u = 0
    x = g.x_axes()[0]
    vals[:, iu] = np.exp(-x ** 2 / 2) / g.du
    K = SampledFunction(g, vals)
    pg = mp.UGrid(-6.0, 4.0, 200)
    s = pg.nodes
    phi = np.cos(s) * np.exp(-(s + 1) ** 2)
    xi = 1.0
    out = mp.representation_apply(K, np.array([xi]), pg, phi)
    want = np.sqrt(2 * np.pi) * np.exp(-(np.exp(s) * xi) ** 2 / 2) * phi
    np.testing.assert_allclose(out, want, atol=1e-10)


def test_representation_routes_agree(rng):
    g = GridSpec((-8.0,), (8.0,), (321,), -8.0, 8.0, 321)
    K = SampledFunction.from_callable(g, lambda x, u: np.exp(-(x[..., 0] - 0.5) ** 2 / 0.5 - (u + 0.3) ** 2 / 0.6))
    pg = mp.UGrid(-12, 8, 400)
    s = pg.nodes
    phi = np.exp(-(s + 1) ** 2) * np.sin(2 * s)
    a = mp.representation_apply(K, np.array([-1.3]), pg, phi, "direct")
    b = mp.representation_apply(K, np.array([-1.3]), pg, phi, "fourier")
    assert np.linalg.norm(a - b) <= 1e-6 * np.linalg.norm(a)


def test_representation_rejects_non_integrable():
    g = _k_grid()
    K = SampledFunction(g, np.ones(g.shape))
    with pytest.raises(ValueError):
        mp.representation_apply(K, np.array([1.0]), mp.UGrid(-6.0, 4.0, 200), np.ones(200))
