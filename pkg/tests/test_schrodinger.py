"""Discrete Schroedinger operator and its two Riesz transforms."""

import numpy as np
import pytest

from axbriesz import schrodinger as sch


def test_grid_validation():
    with pytest.raises(ValueError):
        sch.SchrodingerGrid(-1, 1, 8)
    with pytest.raises(ValueError):
        sch.SchrodingerGrid(1, -1, 32)
    with pytest.raises(ValueError):
        sch.SchrodingerGrid(-1, 1, 32, xi=0.0)
    with pytest.raises(OverflowError):
        sch.SchrodingerGrid(-1, 20, 32)


def test_difference_matrix():
    D = sch.difference_matrix(4)
    g = np.array([1.0, 3.0, 6.0, 10.0])
    np.testing.assert_array_equal(D @ g, [1, 2, 3, 4, -10])


def test_dirichlet_eigenvalue():
    g = sch.SchrodingerGrid(-30.0, -20.0, 512, xi=1.0)   # potential below e^{-40}
    lam = sch.build_H(g).eig[0][0]
    want = np.pi ** 2 / 10.0 ** 2
    assert lam == pytest.approx(want, rel=0.01)


def test_H_monotone_in_xi():
    lo = sch.build_H(sch.SchrodingerGrid(-6, 2, 64, xi=0.5)).eig[0]
    hi = sch.build_H(sch.SchrodingerGrid(-6, 2, 64, xi=2.0)).eig[0]
    assert np.all(hi >= lo - 1e-12)


def test_translation_covariance():
    # xi -> e^v xi is the shift s -> s + v of the potential
    v = 0.5
    a = sch.build_H(sch.SchrodingerGrid(-6, 2, 64, xi=np.exp(v))).matrix
    b = sch.build_H(sch.SchrodingerGrid(-6 + v, 2 + v, 64, xi=1.0)).matrix
    np.testing.assert_allclose(a, b, rtol=1e-12)


@pytest.fixture(scope="module")
def ops():
    g = sch.SchrodingerGrid(-10.0, 3.0, 300, xi=1.0)
    return g, sch.riesz_operators(sch.build_H(g))


def test_pythagoras(ops, rng):
    g, (Rd, Rp) = ops
    for _ in range(20):
        assert sch.pythagoras_residual(Rd, Rp, rng.standard_normal(g.ns)) <= 1e-10
    for f in sch.probe_family(g, 100, 3):
        assert sch.pythagoras_residual(Rd, Rp, f) <= 1e-10


def test_l2_contractions(ops):
    _, (Rd, Rp) = ops
    assert Rd.norm2() <= 1 + 1e-10
    assert Rp.norm2() <= 1 + 1e-10


def test_probe_identity_homogeneity(ops):
    g, _ = ops
    one = sch.DiscreteOperator(np.eye(g.ns), grid=g)
    two = sch.DiscreteOperator(2 * np.eye(g.ns), grid=g)
    for p in (1.5, 2.0, 4.0, 8.0):
        assert sch.lp_norm_probe(one, p) == 1.0
        assert sch.lp_norm_probe(two, p) == 2.0
    bare = sch.DiscreteOperator(np.eye(40))
    assert sch.lp_norm_probe(bare, 3.0) == 1.0


def test_probe_validation(ops):
    g, (Rd, _) = ops
    with pytest.raises(ValueError):
        sch.lp_norm_probe(Rd, 1.0)
    with pytest.raises(ValueError):
        sch.lp_norm_probe(Rd, np.inf)
    with pytest.raises(ValueError):
        sch.lp_norm_probe(Rd, 2.0, trials=50)


def test_probe_l2_below_operator_norm(ops):
    _, (Rd, Rp) = ops
    assert sch.lp_norm_probe(Rd, 2.0) <= Rd.norm2() + 1e-12
    assert sch.lp_norm_probe(Rp, 2.0) <= Rp.norm2() + 1e-12


def test_probe_family_deterministic(ops):
    g, _ = ops
    a = sch.probe_family(g, 100, 9)
    b = sch.probe_family(g, 100, 9)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert sum(np.count_nonzero(f) == 1 for f in a) == 25


def test_eig_needs_symmetry():
    with pytest.raises(ValueError):
        sch.DiscreteOperator(np.eye(3)).eig


def test_near_singular_rejected():
    g = sch.SchrodingerGrid(-1, 1, 16)
    H = sch.DiscreteOperator(np.diag(np.r_[1e-16, np.ones(15)]), symmetric=True, grid=g)
    with pytest.raises(np.linalg.LinAlgError):
        sch.riesz_operators(H)
