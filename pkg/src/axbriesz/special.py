"""Radial profiles on G: Legendre Q functions, Psi_0, Psi_1, Phi_n, heat kernel,
and the kernel of L^{-1/2}.

Every profile is returned in the ``m^{-1/2}``-stripped form, i.e. as a
function of the distance R (or of X = cosh R) only; multiply by
``exp(-n*u/2)`` to get the kernel on G.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial, gamma, pi, sqrt

import numpy as np
from scipy.special import roots_jacobi

from . import jets
from .jets import Jet
from .quadrature import (QuadratureError,
                         graded_nodes, integrate_to_infinity, panel_nodes)

MAX_DIM = 6
X_CAP = 1e300


def check_dim(n: int) -> None:
    if not (isinstance(n, (int, np.integer)) and 1 <= n <= MAX_DIM):
        raise ValueError(f"n out of supported range 1..{MAX_DIM}")


def split_dim(n: int) -> tuple[int, int]:
    """Return (N, j) with Phi_n = (-1)^N Psi_j^{(N)}."""
    check_dim(n)
    return (n - 1) // 2, n % 2


# ---------------------------------------------------------------------------
# Legendre functions Q^0_{lambda - 1/2}

def legendre_q(lam: float, z: float, route: str = "compact",
               max_nodes: int = 1024) -> float:
    """Q^0_{lam-1/2}(z) for lam > 0, z > 1.

    ``route="compact"`` integrates over s in (-1, 1) with the Jacobi weight
    (1-s^2)^{lam-1/2} folded into Gauss-Jacobi nodes; ``route="cosh"`` uses
    the representation over x in (r, inf) with z = cosh r.
    """
    if lam <= 0 or z <= 1:
        raise ValueError("legendre_q needs lam > 0 and z > 1")
    if route == "compact":
        return _legendre_q_compact(lam, z, max_nodes)
    if route == "cosh":
        return _legendre_q_cosh(lam, z)
    raise ValueError(f"unknown route {route!r}")


def _legendre_q_compact(lam, z, max_nodes):
    a = lam - 0.5
    prev = None
    n = 32
    while n <= max_nodes:
        s, w = roots_jacobi(n, a, a)
        val = 2.0 ** (-lam - 0.5) * float(np.dot(w, (z - s) ** (-lam - 0.5)))
        if prev is not None and abs(val - prev) <= 1e-12 * abs(val):
            return val
        prev = val
        n *= 2
    raise QuadratureError("Gauss-Jacobi doubling exceeded its node budget")


def _legendre_q_cosh(lam, z, order=32):
    r = float(np.arccosh(z))
    zm1 = z - 1.0
    # near part: cosh x - cosh r = w^2 turns the endpoint singularity into
    # the smooth factor 2/sinh x
    w1 = sqrt(np.cosh(r + 1.0) - z)
    w, q = panel_nodes(np.linspace(0.0, w1, 9), order)
    y_m1 = zm1 + w * w
    x = np.arccosh(1.0 + y_m1)
    sh = np.sqrt(y_m1 * (y_m1 + 2.0))
    near = float(np.dot(q, 2.0 * np.exp(-lam * x) / sh))

    def tail(x):
        return np.exp(-lam * x) / np.sqrt(np.cosh(x) - z)

    far = integrate_to_infinity(tail, r + 1.0, 2.0, order=order)
    return 2.0 ** -0.5 * (near + far)


# ---------------------------------------------------------------------------
# Psi_0 and its derivatives (forward-mode AD of the closed form)

def _psi0_jet(t: np.ndarray, order: int) -> Jet:
    """Jet of Psi_0 in the variable X, expanded at X = 1 + t."""
    T = Jet.variable(t, order)  # X - 1
    out = np.empty((order + 1,) + np.shape(t))
    small = np.asarray(t) <= 3.0
    if np.any(small):
        Ts = Jet(T.c[:, small])
        q = jets.sqrt(Ts * (Ts + 2.0))
        L = jets.log1p(Ts + q)
        out[:, small] = (q * L).reciprocal().c
    if np.any(~small):
        # (X log X)^{-1} G(1/X, 1/log X), free of X^2 overflow
        X = Jet(T.c[:, ~small]) + 1.0
        a = X.reciprocal()
        sa = jets.sqrt((1.0 - a) * (1.0 + a))
        L = jets.log(X) + jets.log1p(sa)
        out[:, ~small] = (X * sa * L).reciprocal().c
    return Jet(out)


def _as_t(X, xm1):
    if xm1 is None:
        X = np.asarray(X, dtype=float)
        if np.any(X <= 1.0):
            raise ValueError("profiles are defined for X > 1 only")
        if np.any(X > X_CAP):
            raise ValueError("X above the supported cap 1e300")
        return X - 1.0
    t = np.asarray(xm1, dtype=float)
    if np.any(t <= 0):
        raise ValueError("profiles are defined for X > 1 only")
    return t


def psi0(k: int, X=None, *, xm1=None):
    """k-th derivative of Psi_0(X) = 1/(sqrt(X^2-1) log(X + sqrt(X^2-1))).

    Pass ``xm1 = X - 1`` instead of ``X`` to keep full relative accuracy
    near X = 1.
    """
    t = _as_t(X, xm1)
    val = _psi0_jet(np.atleast_1d(t), k).derivative(k)
    return val.reshape(np.shape(t)) if np.ndim(t) else float(val[0])


# ---------------------------------------------------------------------------
# Psi_1 and its derivatives via the s-integral with log powers

@lru_cache(maxsize=None)
def rising_coefficients(k: int) -> tuple[Fraction, ...]:
    """Coefficients c_l of prod_{l<k} (lam + 1/2 + l) in powers of lam."""
    poly = [Fraction(1)]
    for ell in range(k):
        shift = Fraction(1, 2) + ell
        new = [Fraction(0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i] += c * shift
            new[i + 1] += c
        poly = new
    c0 = float(poly[0])
    assert abs(c0 - gamma(k + 0.5) / sqrt(pi)) <= 1e-14 * c0
    return tuple(poly)


@lru_cache(maxsize=None)
def _psi1_nodes(order: int, smallest: float):
    w, q = graded_nodes(1.0, smallest, order)
    return w, q


def psi1(k: int, X=None, *, xm1=None, order: int = 16, chunk: int = 2048):
    """k-th derivative of Psi_1(X) = pi^{-1/2} int_{arccosh X}^inf (cosh x - X)^{-1/2} dx/x.

    Evaluated through the single integral over s in (-1, 1) carrying the
    powers log^{-l-1}(2(X-s)/(1-s^2)); both endpoints are handled with
    s = +-(1 - w^2) on a mesh graded geometrically toward w = 0.
    """
    t = _as_t(X, xm1)
    flat = np.atleast_1d(t).ravel()
    out = np.empty_like(flat)
    for start in range(0, flat.size, chunk):
        out[start:start + chunk] = _psi1_block(k, flat[start:start + chunk], order)
    return out.reshape(np.shape(t)) if np.ndim(t) else float(out[0])


def _psi1_block(k, t, order):
    coeffs = rising_coefficients(k)
    w, q = _psi1_nodes(order, 1e-15)
    w2 = (w * w)[None, :]
    tt = t[:, None]
    X = 1.0 + tt
    jac = (2.0 / np.sqrt(2.0 - w2)) * q[None, :]
    total = np.zeros(t.shape)
    # s = 1 - w^2: X - s = t + w^2 and 1 - s^2 = w^2 (2 - w^2)
    xs = tt + w2
    loga = np.log1p(tt / w2) - np.log1p(-0.5 * w2)
    base = xs ** (-0.5 - k) * jac
    for ell, c in enumerate(coeffs):
        total += float(c) * factorial(ell) * np.sum(base * loga ** (-ell - 1), axis=1)
    # s = -(1 - w^2): X - s = X + 1 - w^2
    xs = X + 1.0 - w2
    loga = np.log(2.0 * xs) - np.log(w2) - np.log(2.0 - w2)
    base = xs ** (-0.5 - k) * jac
    for ell, c in enumerate(coeffs):
        total += float(c) * factorial(ell) * np.sum(base * loga ** (-ell - 1), axis=1)
    return (-1) ** k * total / sqrt(pi)


def psi1_direct(X: float, order: int = 32) -> float:
    """Psi_1 from its defining x-integral (reference route, k = 0 only)."""
    if X <= 1:
        raise ValueError("profiles are defined for X > 1 only")
    r = float(np.arccosh(X))
    w1 = sqrt(np.cosh(r + 1.0) - X)
    w, q = panel_nodes(np.linspace(0.0, w1, 17), order)
    y_m1 = (X - 1.0) + w * w
    x = np.arccosh(1.0 + y_m1)
    near = float(np.dot(q, 2.0 / (x * np.sqrt(y_m1 * (y_m1 + 2.0)))))
    far = integrate_to_infinity(lambda x: 1.0 / (x * np.sqrt(np.cosh(x) - X)),
                                r + 1.0, 2.0, order=order)
    return (near + far) / sqrt(pi)


def phi(n: int, k: int, X=None, *, xm1=None):
    """Phi_n^{(k)}(X) with Phi_n = (-1)^N Psi_j^{(N)}, N = floor((n-1)/2), j = n mod 2."""
    N, j = split_dim(n)
    f = psi1 if j == 1 else psi0
    val = f(N + k, X, xm1=xm1)
    return (-1) ** N * val


def asymptotic_leading(n: int, k: int, X, regime: str):
    """Leading term of Phi_n^{(k)} at X -> inf ("infinity") or X -> 1+ ("local")."""
    X = np.asarray(X, dtype=float)
    g = (-1) ** k * gamma(k + n / 2)
    if regime == "infinity":
        out = g / (X ** (k + n / 2) * np.log(X))
    elif regime == "local":
        out = g / (2.0 * (X - 1.0) ** (k + n / 2))
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return float(out) if out.ndim == 0 else out


def local_exponent(n: int, k: int) -> float:
    """The delta of the local remainder: 1/2 for (n, k) = (1, 0), else 1."""
    return 0.5 if (n == 1 and k == 0) else 1.0


# ---------------------------------------------------------------------------
# heat kernel

def _gauss_jet(xjet: Jet, t) -> Jet:
    t = np.asarray(t, dtype=float)
    return jets.exp(xjet * xjet * (-0.25 / t)) * (4.0 * pi * t) ** -0.5


def _apply_D(xc, t, m):
    """(-(1/sinh x) d/dx)^m applied to the real heat kernel, at points xc."""
    g = _gauss_jet(Jet.variable(xc, m), t)
    x = Jet.variable(xc, m)
    for level in range(m):
        order = m - level - 1
        sh, _ = jets.sinh_cosh(Jet(x.c[:order + 1]))
        g = -(g.shift() / sh)
    return g.value


def heat_kernel(n: int, t: float, R, rtol: float = 1e-12):
    """(m^{-1/2} h_t)(R): the heat kernel of L on G with the modular factor removed."""
    check_dim(n)
    if np.any(np.asarray(t) <= 0):
        raise ValueError("t must be positive")
    if np.any(np.asarray(R) < 0):
        raise ValueError("R must be nonnegative")
    if n % 2 == 0:
        R = np.asarray(R, dtype=float)
        out = (2 * pi) ** (-n / 2) * _apply_D(R, t, n // 2)
        return float(out) if out.ndim == 0 else out
    if np.ndim(R) == 0:
        return float(_heat_odd(n, np.atleast_1d(np.asarray(t, float)), float(R), rtol)[0])
    return np.array([heat_kernel(n, t, r, rtol) for r in np.asarray(R, float)])


def heat_kernel_many_t(n: int, t: np.ndarray, R: float, rtol: float = 1e-12):
    """Vectorized over t for a fixed R (used by subordination)."""
    t = np.asarray(t, dtype=float)
    if n % 2 == 0:
        x = np.full(t.shape, float(R))
        return (2 * pi) ** (-n / 2) * _apply_D(x, t, n // 2)
    return _heat_odd(n, t, float(R), rtol)


def _heat_odd(n, t, R, rtol, order=16, max_panels=4096):
    m = (n + 1) // 2
    tmin, tmax = float(np.min(t)), float(np.max(t))
    scale = min(sqrt(tmin), 2.0 * tmin / max(R, 1e-12), 1.0)
    x_hi = max(R + 2.0, min(R + 90.0, sqrt(R * R + 200.0 * tmax) + 2.0))
    coshR = np.cosh(R)
    w1 = sqrt(np.cosh(R + 1.0) - coshR)

    def run(pa, pb):
        w, qa = panel_nodes(np.linspace(0.0, w1, pa + 1), order)
        ym = 2.0 * np.sinh(R / 2) ** 2 + w * w  # cosh x - 1
        xa = np.log1p(ym + np.sqrt(ym * (ym + 2.0)))
        xb, qb = panel_nodes(np.linspace(R + 1.0, x_hi, pb + 1), order)
        xs = np.concatenate([xa, xb])
        # sinh x (cosh x - cosh R)^{-1/2} on the far part, 2 on the near part
        wb = qb * np.sinh(xb) / np.sqrt(np.cosh(xb) - coshR)
        wts = np.concatenate([2.0 * qa, wb])
        vals = _apply_D(np.broadcast_to(xs, t.shape + xs.shape),
                        t[..., None], m)
        return vals @ wts

    pa = int(np.clip(np.ceil(4.0 / sqrt(scale)), 4, max_panels))
    pb = int(np.clip(np.ceil((x_hi - R - 1.0) / (0.5 * scale)), 4, max_panels))
    prev = run(pa, pb)
    while True:
        pa2, pb2 = min(2 * pa, max_panels), min(2 * pb, max_panels)
        cur = run(pa2, pb2)
        err = np.max(np.abs(cur - prev) / np.maximum(np.abs(cur), 1e-300))
        if err <= rtol:
            break
        if pa2 == pa and pb2 == pb:
            raise QuadratureError("heat kernel quadrature did not converge")
        pa, pb, prev = pa2, pb2, cur
    return cur / (sqrt(pi) * (2 * pi) ** (n / 2))


# ---------------------------------------------------------------------------
# kernel of L^{-1/2}

def sqrt_inv_kernel(n: int, R: float, mode: str = "closed_form") -> float:
    """(m^{-1/2} k_{L^{-1/2}})(R)."""
    check_dim(n)
    if R <= 0:
        raise ValueError("R must be positive")
    if mode == "closed_form":
        xm1 = 2.0 * np.sinh(R / 2) ** 2
        return phi(n, 0, xm1=xm1) / (pi * (2 * pi) ** (n / 2))
    if mode == "subordination":
        return _subordinate(n, R)
    raise ValueError(f"unknown mode {mode!r}")


def _subordinate(n, R):
    # t = e^s; integrand h_t(R) t^{1/2} ds; the left end sits where
    # exp(-R^2/4t) is far below double precision relative to the peak
    s_lo = np.log(R * R / 160.0)

    def f(s):
        t = np.exp(s)
        return heat_kernel_many_t(n, t, R) * np.sqrt(t)

    return integrate_to_infinity(f, s_lo, 1.0, order=24) / sqrt(pi)


class PhiTable:
    """Spline table of Phi_n^{(k)} in the variable tau = log(X - 1).

    The table stores log|Phi_n^{(k)}| (the sign is (-1)^k throughout), which
    is smooth and nearly linear in tau, so a cubic spline with step 0.005
    reproduces the direct evaluator to about 1e-11 relative.  Used by the
    sweeps that need millions of kernel values.
    """

    def __init__(self, n: int, k: int, tau_min: float = -30.0,
                 tau_max: float = 40.0, step: float = 0.005):
        from scipy.interpolate import CubicSpline
        check_dim(n)
        self.n, self.k = n, k
        self.tau_min, self.tau_max = tau_min, tau_max
        tau = np.arange(tau_min, tau_max + step / 2, step)
        vals = phi(n, k, xm1=np.exp(tau))
        self.sign = (-1) ** k
        if np.any(self.sign * vals <= 0):
            raise ValueError("Phi derivative changed sign inside the table range")
        self._spline = CubicSpline(tau, np.log(self.sign * vals))

    def __call__(self, xm1):
        tau = np.log(np.asarray(xm1, dtype=float))
        if np.any(tau < self.tau_min) or np.any(tau > self.tau_max):
            raise ValueError("argument outside the tabulated range")
        return self.sign * np.exp(self._spline(tau))


@lru_cache(maxsize=None)
def phi_table(n: int, k: int) -> PhiTable:
    return PhiTable(n, k)
