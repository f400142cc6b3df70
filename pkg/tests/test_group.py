"""Group law, metric, modular function and sampled convolution."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from axbriesz.group import (GridSpec, GroupPoint, SampledFunction, convolve, distance, involute,
                            invert, modular, multiply)

coord = st.floats(min_value=-3, max_value=3)


def pt(x, u):
    return GroupPoint(np.atleast_1d(x), u)


def test_multiply_examples():
    r = multiply(pt(1, 0), pt(2, 0))
    assert r.x[0] == 3 and r.u == 0
    r = multiply(pt(0, np.log(2)), pt(1, 0))
    assert r.x[0] == pytest.approx(2) and r.u == pytest.approx(np.log(2))
    r = multiply(pt([1, 1], 0.3), pt([-1, 2], -0.3))
    e = np.exp(0.3)
    np.testing.assert_allclose(r.x, [1 - e, 1 + 2 * e], rtol=1e-15)
    assert r.u == pytest.approx(0.0, abs=1e-16)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        multiply(pt([1, 2], 0), pt(1, 0))


def test_invert_examples():
    r = invert(pt(1, np.log(2)))
    assert r.x[0] == pytest.approx(-0.5) and r.u == pytest.approx(-np.log(2))
    assert invert(pt(2.5, 0)).x[0] == -2.5
    assert invert(pt(0, 1.5)).u == -1.5


@given(coord, coord, coord, coord, coord, coord)
def test_associative_and_inverse(a, b, c, d, e, f):
    p, q, r = pt(a, b), pt(c, d), pt(e, f)
    lhs, rhs = multiply(multiply(p, q), r), multiply(p, multiply(q, r))
    np.testing.assert_allclose(lhs.x, rhs.x, rtol=1e-12, atol=1e-12)
    assert lhs.u == pytest.approx(rhs.u, abs=1e-12)
    one = multiply(p, invert(p))
    assert abs(one.x[0]) < 1e-12 and abs(one.u) < 1e-15


def test_distance_examples():
    assert distance(pt(0, 1.7)) == pytest.approx(1.7, rel=1e-14)
    assert distance(pt(0, -0.4)) == pytest.approx(0.4, rel=1e-14)
    assert distance(pt(0, 0)) == 0
    assert distance(pt(3, 0)) == pytest.approx(np.arccosh(5.5), rel=1e-14)
    assert np.arccosh(5.5) == pytest.approx(2.38953, abs=1e-5)


@given(coord, coord, coord, coord)
def test_distance_left_invariant(a, b, c, d):
    # d(p, q) = d(q^{-1} p) is symmetric
    p, q = pt(a, b), pt(c, d)
    assert distance(multiply(invert(q), p)) == pytest.approx(distance(multiply(invert(p), q)),
                                                            rel=1e-9, abs=1e-9)


def test_modular_examples():
    assert modular(pt([1, 2, 3], 0)) == 1
    assert modular(pt(0, np.log(2))) == pytest.approx(0.5)
    assert modular(pt([0, 0, 0], 1)) == pytest.approx(np.exp(-3))


def _grid(n=1, L=4.0, U=3.0, nx=61, nu=41):
    return GridSpec((-L,) * n, (L,) * n, (nx,) * n, -U, U, nu)


def test_involute_zero_and_radial():
    g = _grid()
    zero = SampledFunction(g, np.zeros(g.shape))
    assert np.all(involute(zero).values == 0)
    # m^{1/2} phi(R), with cosh R - 1 = 2 sinh^2(u/2) + e^{-u} x^2 / 2
    f = SampledFunction.from_callable(
        g, lambda x, u: np.exp(-u / 2) * np.exp(-(2 * np.sinh(u / 2) ** 2 + 0.5 * np.exp(-u) * x[..., 0] ** 2)))
    fs = involute(f)
    x, u = g.mesh()
    inside = (np.abs(x[..., 0]) * np.exp(-u) < 3.5)
    np.testing.assert_allclose(fs.values[inside], f.values[inside], atol=2e-2)


def test_involute_preserves_mass_of_box():
    g = GridSpec((-6.0,), (6.0,), (481,), -1.5, 1.5, 241)
    box = lambda x, u: ((np.abs(x[..., 0]) <= 1) & (np.abs(u) <= 0.5)).astype(float)
    f = SampledFunction.from_callable(g, box)
    assert involute(f).l1() == pytest.approx(f.l1(), rel=1e-2)


def test_convolve_delta_and_positivity():
    g = _grid(L=4, U=2, nx=41, nu=21)
    f = SampledFunction.from_callable(g, lambda x, u: np.exp(-x[..., 0] ** 2 - 2 * u ** 2))
    delta = np.zeros(g.shape)
    i0, j0 = 20, 10
    delta[i0, j0] = 1.0 / g.trapezoid_weights()[i0, j0]
    with pytest.warns(RuntimeWarning):
        out = convolve(f, SampledFunction(g, delta))
    np.testing.assert_allclose(out.values, f.values, atol=1e-12)
    h = SampledFunction.from_callable(g, lambda x, u: np.exp(-4 * x[..., 0] ** 2 - 4 * u ** 2))
    with pytest.warns(RuntimeWarning):
        both = convolve(h, f)
    assert np.all(both.values >= 0)


def test_grid_csv_roundtrip(tmp_path):
    g = _grid(nx=5, nu=4)
    f = SampledFunction.from_callable(g, lambda x, u: x[..., 0] * u)
    f.to_csv(tmp_path / "f.csv")
    back = SampledFunction.from_csv(tmp_path / "f.csv")
    assert back.grid == g
    np.testing.assert_array_equal(back.values, f.values)


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec((0.0,), (1.0,), (1,), 0, 1, 4)
    with pytest.raises(ValueError):
        GridSpec((1.0,), (0.0,), (3,), 0, 1, 4)
    with pytest.raises(ValueError):
        SampledFunction(_grid(nx=5, nu=4), np.zeros((4, 5)))
