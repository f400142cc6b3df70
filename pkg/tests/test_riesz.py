"""Kernel formulas, main terms, radial integrals and the Hardy experiment."""

from math import gamma, pi

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import dblquad

from axbriesz import riesz, special
from axbriesz.group import GroupPoint, cosh_distance_m1, distance_xu
from axbriesz.riesz import KernelId


def P(x, u):
    return GroupPoint(np.atleast_1d(np.asarray(x, dtype=float)), u)


def test_local_constant():
    for n in (1, 2, 3):
        assert riesz.local_constant(n) == pytest.approx(gamma(1 + n / 2) / pi ** (1 + n / 2))


def test_kernel_id_validation():
    with pytest.raises(ValueError):
        KernelId(1, 1, "K0")
    with pytest.raises(ValueError):
        KernelId(2, 0, "Kj")
    with pytest.raises(ValueError):
        KernelId(1, 2, "R")
    with pytest.raises(ValueError):
        KernelId(1, 0, "nonsense")


def test_profiles_values_and_parity():
    pp = riesz.ProfilePair(2)
    assert pp.r0(np.zeros(2)) == 1.0
    assert pp.rj(1, np.zeros(2)) == 0.0
    x = np.array([0.3, -1.2])
    assert pp.r0(-x) == pp.r0(x)
    assert pp.rj(2, x * [1, -1]) == -pp.rj(2, x)
    assert pp.r0(x) == pytest.approx((1 + x @ x) ** -2)
    lam = 3.0
    assert riesz.rescaled(0, x, lam) == pytest.approx(lam ** -2 * pp.r0(x / lam))


def test_riesz_kernel_odd_in_xj():
    kid = KernelId(2, 1, "R")
    p, q = P([0.8, 0.3], 0.2), P([-0.8, 0.3], 0.2)
    assert riesz.riesz_kernel(kid, q) == pytest.approx(-riesz.riesz_kernel(kid, p), rel=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_r0_plus_at_x0(n):
    u = 0.7
    want = -n * np.exp(-n * u / 2) * special.phi(n, 0, np.cosh(u)) / (pi * (2 * pi) ** (n / 2))
    got = riesz.riesz_kernel(KernelId(n, 0, "R0_plus_R0star"), P(np.zeros(n), u))
    assert got == pytest.approx(want, rel=1e-10)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("j", [0, 1])
def test_adjoint_is_involution(n, j):
    rng = np.random.default_rng(3)
    for _ in range(5):
        x, u = rng.normal(size=n), rng.normal()
        k_star = riesz.riesz_kernel(KernelId(n, j, "Rstar"), P(x, u))
        inv = np.exp(-n * u) * riesz.riesz_kernel(KernelId(n, j, "R"), P(-np.exp(-u) * x, -u))
        assert k_star == pytest.approx(inv, rel=1e-10)


def _sqrt_inv_xu(n, x, u):
    t = cosh_distance_m1(np.atleast_1d(x), u)
    return np.exp(-n * u / 2) * special.phi(n, 0, xm1=t) / (pi * (2 * pi) ** (n / 2))


def test_kernel_is_left_invariant_derivative():
    x, u, h = 0.7, 0.4, 1e-5
    # X_1 = e^u d/dx
    fd = np.exp(u) * (_sqrt_inv_xu(1, x + h, u) - _sqrt_inv_xu(1, x - h, u)) / (2 * h)
    assert riesz.riesz_kernel(KernelId(1, 1, "R"), P(x, u)) == pytest.approx(fd, rel=1e-3)


def test_riesz_kernel_rejects():
    with pytest.raises(ValueError):
        riesz.riesz_kernel(KernelId(1, 1, "R"), P(0.0, 0.0))
    with pytest.raises(ValueError):
        riesz.riesz_kernel(KernelId(1, 1, "Kj"), P(1.0, 0.0))


def test_local_main_term_examples():
    for n in (1, 2, 3):
        assert riesz.local_main_term(n, 0, P(np.zeros(n), 1.0)) == 1.0
    with pytest.raises(ValueError):
        riesz.local_main_term(1, 0, P(0.0, 0.0))


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 2), st.sampled_from([0, 1, 2]))
def test_local_main_term_homogeneous(a, b, u, j):
    lam = 2.0
    p, q = P([a, b], u), P([lam * a, lam * b], lam * u)
    assert riesz.local_main_term(2, j, q) == pytest.approx(lam ** -3 * riesz.local_main_term(2, j, p),
                                                          rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("n,j", [(1, 1), (2, 0), (2, 2)])
def test_local_remainder_exponent(n, j):
    c = riesz.local_constant(n)
    kid = KernelId(n, j, "R")
    direction = np.linspace(0.3, 0.9, n + 1)
    direction /= np.linalg.norm(direction)
    R = 2.0 ** -np.arange(4, 13)
    rem = []
    for r in R:
        x, u = r * direction[:n], r * direction[n]
        rem.append(abs(riesz.riesz_kernel(kid, P(x, u)) + c * riesz.local_main_term(n, j, P(x, u))))
    slope = np.polyfit(np.log(R), np.log(rem), 1)[0]
    assert slope >= -n - 0.1
    # the bare kernel blows up one order faster
    assert riesz.riesz_kernel(kid, P(R[-1] * direction[:n], R[-1] * direction[n])) != 0


def test_infinity_main_term_examples():
    assert riesz.infinity_main_term(KernelId(1, 1, "Kj"), P(3.0, -0.5)) == 0.0
    x, u = np.array([1.3]), 2.5
    s = (riesz.infinity_main_term(KernelId(1, 0, "K0_tilde"), P(x, u))
         + riesz.infinity_main_term(KernelId(1, 0, "K0"), P(x, u)))
    assert s == pytest.approx(riesz.rescaled(0, x, np.exp(u)) / u, rel=1e-14)
    # K0 vanishes below u = 1, K0_tilde inside |u| < 1
    assert riesz.infinity_main_term(KernelId(1, 0, "K0"), P(x, -3.0)) == 0.0
    assert riesz.infinity_main_term(KernelId(1, 0, "K0_tilde"), P(x, 0.5)) == 0.0
    v = riesz.infinity_main_term(KernelId(2, 2, "Kj"), P([0.5, 2.0], -4.0))
    assert v == pytest.approx(riesz.r_profile(2, np.array([0.5, 2.0])) / -4.0)


def test_radial_trivial_cases():
    zero = lambda r: np.zeros_like(r)
    assert riesz.radial_weighted_integral(zero, "x", 1) == (0.0, 0.0)
    box = lambda r: (np.asarray(r) <= 1).astype(float)
    _, rhs = riesz.radial_weighted_integral(box, "x", 1)
    assert rhs == pytest.approx(1 / 3, rel=1e-12)
    with pytest.raises(ValueError):
        riesz.radial_weighted_integral(zero, "y", 1)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("wid", ["x", "x_restu", "u", "u_restu"])
def test_radial_ratio_band(n, wid):
    f = lambda r: np.exp(-(2 + n) * np.asarray(r))
    lhs, rhs = riesz.radial_weighted_integral(f, wid, n)
    lhs2, rhs2 = riesz.radial_weighted_integral(f, wid, n, order=40)
    assert 0.05 <= lhs / rhs <= 20
    assert lhs2 / rhs2 == pytest.approx(lhs / rhs, rel=0.05)


@pytest.mark.parametrize("wid,weight", [
    ("x", lambda x, u: abs(x)),
    ("u", lambda x, u: abs(np.sinh(u))),
    ("u_restu", lambda x, u: abs(u) * (abs(u) <= 1)),
])
def test_radial_lhs_against_plane_quadrature(wid, weight):
    # n = 1: integrate w |x|^N m^{1/2} f(d) directly over the (x,u) plane
    f = lambda r: np.exp(-4.0 * r)
    g = lambda x, u: weight(x, u) * np.exp(-u / 2) * f(distance_xu(np.array([x]), u))
    ref = 0.0
    for ua, ub in ((-12, -1), (-1, 0), (0, 1), (1, 12)):
        ref += 2 * dblquad(lambda x, u: g(x, u), ua, ub, 0, lambda u: 60 * np.exp(u) + 60,
                           epsabs=1e-12, epsrel=1e-9)[0]
    lhs, _ = riesz.radial_weighted_integral(f, wid, 1)
    assert lhs == pytest.approx(ref, rel=1e-5)


def test_remainder_check_bare_kernel_exceeds_remainder():
    a = riesz.remainder_integrability_check(1, 1, 8.0)
    b = riesz.remainder_integrability_check(1, 1, 8.0, main_scale=0.0)
    assert 0 < a < b
    with pytest.raises(ValueError):
        riesz.remainder_integrability_check(1, 1, 1.0)


def test_remainder_cauchy_n1_j1():
    M = [riesz.remainder_integrability_check(1, 1, U) for U in (4, 8, 16, 32)]
    inc = np.diff(M)
    assert np.all(inc > 0)
    assert np.all(inc[:-1] / inc[1:] >= 1.5)


def test_hardy_zero_atom_and_monotone():
    assert riesz.hardy_divergence(1, 1, 8.0, v_scale=0.0) == 0.0
    a, b = riesz.hardy_divergence(1, 1, 4.0), riesz.hardy_divergence(1, 1, 8.0)
    assert 0 < a < b
    with pytest.raises(ValueError):
        riesz.hardy_divergence(1, 1, 2.0)


def test_bump_support():
    t = np.array([-1.0, -0.5, 0.0, 0.99, 1.0, 2.0])
    b = riesz.bump(t)
    assert b[0] == b[4] == b[5] == 0
    assert b[2] == pytest.approx(np.exp(-1))
