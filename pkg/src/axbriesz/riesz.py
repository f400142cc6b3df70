"""Riesz-transform kernels on G: exact formulas, local and far main terms,
radial weighted integrals and the Hardy-space divergence experiment."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gamma, pi

import numpy as np

from . import special
from .group import GroupPoint, cosh_distance_m1
from .quadrature import (QuadratureError, integrate_to_infinity, panel_nodes,
                         uniform_nodes)

VARIANTS = ("R", "Rstar", "R0_minus_R0star", "R0_plus_R0star",
            "K0_tilde", "K0", "Kj", "Kj0_local")
EXACT_VARIANTS = VARIANTS[:4]
FAR_VARIANTS = ("K0_tilde", "K0", "Kj")


@dataclass(frozen=True)
class ProfilePair:
    """The far-field profiles r_0 and r_j on R^n."""
    n: int

    def r0(self, x):
        return r_profile(0, x)

    def rj(self, j: int, x):
        if not 1 <= j <= self.n:
            raise ValueError("j must lie in 1..n")
        return r_profile(j, x)


@dataclass(frozen=True)
class KernelId:
    n: int
    j: int
    variant: str

    def __post_init__(self):
        special.check_dim(self.n)
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if not 0 <= self.j <= self.n:
            raise ValueError("j must lie in 0..n")
        if self.variant in ("R0_minus_R0star", "R0_plus_R0star", "K0_tilde", "K0") and self.j != 0:
            raise ValueError(f"variant {self.variant} requires j = 0")
        if self.variant == "Kj" and self.j < 1:
            raise ValueError("variant Kj requires j >= 1")


def local_constant(n: int) -> float:
    """Gamma(1+n/2) / pi^{1+n/2}."""
    return gamma(1 + n / 2) / pi ** (1 + n / 2)


def r_profile(j: int, x):
    """r_0(x) = (1+|x|^2)^{-1-n/2}; r_j(x) = x_j r_0(x). x has the axis last."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    r0 = (1.0 + np.sum(x * x, axis=-1)) ** (-1.0 - n / 2)
    return r0 if j == 0 else x[..., j - 1] * r0


def rescaled(j: int, x, lam):
    """(r_j)_{(lam)}(x) = lam^{-n} r_j(x / lam)."""
    x = np.asarray(x, dtype=float)
    lam = np.asarray(lam, dtype=float)
    n = x.shape[-1]
    return lam ** (-n) * r_profile(j, x / lam[..., None])


# ---------------------------------------------------------------------------
# exact kernels

def _profiles(n, x, u, tabulated):
    t = cosh_distance_m1(x, u)
    if np.any(t <= 0):
        raise ValueError("kernel is singular at the identity")
    if tabulated:
        return t, special.phi_table(n, 0)(t), special.phi_table(n, 1)(t)
    return t, special.phi(n, 0, xm1=t), special.phi(n, 1, xm1=t)


def kernel_xu(kid: KernelId, x, u, tabulated: bool = False):
    """Vectorized kernel evaluation; x has the coordinate axis last."""
    n, j, var = kid.n, kid.j, kid.variant
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape[-1] != n:
        raise ValueError("x has the wrong dimension")
    if var == "Kj0_local":
        return local_main_term_xu(n, j, x, u)
    if var in FAR_VARIANTS:
        return far_main_term_xu(kid, x, u)
    _, P0, P1 = _profiles(n, x, u, tabulated)
    F = np.exp(-0.5 * n * u) / (pi * (2 * pi) ** (n / 2))
    r2e = np.exp(-u) * np.sum(x * x, axis=-1)
    if var == "R0_minus_R0star":
        return 2.0 * np.sinh(u) * F * P1
    if var == "R0_plus_R0star":
        return -F * (n * P0 + r2e * P1)
    if j >= 1:
        xj = x[..., j - 1]
        return F * P1 * (xj if var == "R" else -np.exp(-u) * xj)
    # j = 0: half sum / half difference of the two combinations above
    plus = -F * (n * P0 + r2e * P1)
    minus = 2.0 * np.sinh(u) * F * P1
    return 0.5 * (plus + minus) if var == "R" else 0.5 * (plus - minus)


def riesz_kernel(kid: KernelId, p: GroupPoint) -> float:
    if kid.variant not in EXACT_VARIANTS:
        raise ValueError("riesz_kernel evaluates the exact variants only")
    if p.n != kid.n:
        raise ValueError("dimension mismatch")
    return float(kernel_xu(kid, p.x, p.u))


def local_main_term_xu(n, j, x, u):
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    d2 = u * u + np.sum(x * x, axis=-1)
    if np.any(d2 == 0):
        raise ValueError("local main term is singular at the identity")
    num = u if j == 0 else x[..., j - 1]
    return num * d2 ** (-(n + 2) / 2)


def local_main_term(n: int, j: int, p: GroupPoint) -> float:
    """K_j^0(x,u) = (u^2+|x|^2)^{-(n+2)/2} times u (j = 0) or x_j."""
    return float(local_main_term_xu(n, j, p.x, p.u))


def far_main_term_xu(kid: KernelId, x, u):
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if kid.variant == "K0_tilde":
            out = r_profile(0, x) / u
            return np.where(np.abs(u) >= 1, out, 0.0)
        if kid.variant == "K0":
            out = (rescaled(0, x, np.exp(u)) - r_profile(0, x)) / u
            return np.where(u >= 1, out, 0.0)
        if kid.variant == "Kj":
            out = r_profile(kid.j, x) / u
            return np.where(u <= -1, out, 0.0)
    raise ValueError(f"{kid.variant} is not a far main term")


def infinity_main_term(kid: KernelId, p: GroupPoint) -> float:
    return float(far_main_term_xu(kid, p.x, p.u))


# ---------------------------------------------------------------------------
# radial weighted integrals

WEIGHTS = {
    # name: (w(u), N, exponent c in the far part of the right-hand side)
    "x": (lambda u: np.ones_like(u), 1, None),
    "x_restu": (lambda u: (u <= 1).astype(float), 1, None),
    "u": (lambda u: np.abs(np.sinh(u)), 0, None),
    "u_restu": (lambda u: np.abs(u) * (np.abs(u) <= 1), 0, None),
}


def _far_exponent(weight_id, n):
    return {"x": 1 + n / 2, "x_restu": 0.5 + n / 2, "u": 1 + n / 2, "u_restu": n / 2}[weight_id]


def radial_density(weight_id: str, n: int, r, order: int = 24):
    """Density of w(u)|x|^N m^{1/2} dx du pushed forward to R = r.

    sinh r int_{-r}^{r} w(u) e^{Nu/2} (cosh r - cosh u)^{(n+N)/2-1} du,
    times omega_{n-1} 2^{(n+N)/2-1}.  Near |u| = r the substitution
    u = +-(r - v^2) absorbs the (r - |u|)^{-1/2} endpoint singularity.
    """
    w, N, _ = WEIGHTS[weight_id]
    beta = (n + N) / 2 - 1
    const = 2 * pi ** (n / 2) / gamma(n / 2) * 2.0 ** beta
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty(r.shape)
    for idx, rr in enumerate(r):
        if rr <= 0:
            out[idx] = 0.0
            continue
        vmax = np.sqrt(rr)
        cuts = [0.0, vmax]
        if rr > 1:
            cuts.insert(1, np.sqrt(rr - 1.0))  # kinks of the weights at |u| = 1
        v, q = panel_nodes(np.array(cuts), order)
        total = 0.0
        for sgn in (1.0, -1.0):
            au = rr - v * v
            uu = sgn * au
            # cosh r - cosh u = 2 sinh((r+|u|)/2) sinh(v^2/2); divide out v^{2 beta}
            core = 2.0 * np.sinh(0.5 * (rr + au)) * np.where(
                v > 0, np.sinh(0.5 * v * v) / np.maximum(v * v, 1e-300), 0.5)
            integrand = w(uu) * np.exp(0.5 * N * uu) * core ** beta * 2.0 * v ** (2 * beta + 1)
            total += float(np.dot(q, integrand))
        out[idx] = np.sinh(rr) * total * const
    return out if out.size > 1 else out


def radial_weighted_integral(f, weight_id: str, n: int, order: int = 24):
    """Return (lhs, rhs) for one of the four weighted integrals.

    lhs integrates w(u)|x|^N m^{1/2} f(R) over G through the radial density;
    rhs is int_0^1 f r^{n+1} dr + int_1^inf f e^{c r} dr.
    """
    if weight_id not in WEIGHTS:
        raise ValueError(f"unknown weight {weight_id!r}")
    c = _far_exponent(weight_id, n)
    try:
        r, q = panel_nodes(np.linspace(0, 1, 5), order)
        lhs = float(np.dot(q, f(r) * radial_density(weight_id, n, r, order)))
        # r = 1 + v^2 smooths the square-root kink that the weight cutoffs leave at r = 1
        lhs += integrate_to_infinity(
            lambda v: 2 * v * f(1 + v * v) * radial_density(weight_id, n, 1 + v * v, order),
            0.0, 0.25, order=order)
        near = float(np.dot(q, f(r) * r ** (n + 1)))
        far = integrate_to_infinity(lambda r: f(r) * np.exp(c * r), 1.0, 0.5, order=order)
    except QuadratureError as exc:
        raise ValueError("integral appears divergent: tail never fell below cutoff") from exc
    return lhs, near + far


# ---------------------------------------------------------------------------
# remainders at infinity

def _sphere_area(n):
    return 2 * pi ** (n / 2) / gamma(n / 2)


def _abs_coordinate_moment(n):
    """int over S^{n-1} of |omega_j|."""
    return 2 * pi ** ((n - 1) / 2) / gamma((n + 1) / 2)


def remainder_integrand(n, j, rho, u, main_scale: float = 1.0):
    """|k - c * main| / (|x_j| if j >= 1), as a function of (|x|, u).

    j = 0 pairs k_{R0 - R0*} with c (K0_tilde + K0); j >= 1 pairs k_{Rj*}
    with c K_j; c = -2 Gamma(1+n/2) / pi^{1+n/2}.  ``main_scale = 0`` gives
    the bare kernel and ``main_scale = 1`` the remainder.
    """
    c = -2.0 * local_constant(n) * main_scale
    t = 2.0 * np.sinh(0.5 * u) ** 2 + 0.5 * np.exp(-u) * rho * rho
    P1 = special.phi_table(n, 1)(t)
    F = np.exp(-0.5 * n * u) / (pi * (2 * pi) ** (n / 2))
    if j == 0:
        k = 2.0 * np.sinh(u) * F * P1
        lam = np.where(u >= 1, np.exp(u), 1.0)
        main = lam ** (-n) * (1.0 + (rho / lam) ** 2) ** (-1 - n / 2) / u
    else:
        k = -np.exp(-u) * F * P1
        main = np.where(u <= -1, (1.0 + rho * rho) ** (-1 - n / 2) / u, 0.0)
    return np.abs(k - c * main)


def remainder_integrability_check(n: int, j: int, U: float, main_scale: float = 1.0,
                                  order: int = 16, u_step: float = 0.25,
                                  eta_step: float = 0.25, eta_min: float = -30.0) -> float:
    """int over {1 <= |u|, R <= U} of |k - main| dx du."""
    if U < 2:
        raise ValueError("U must be >= 2")
    if j > 0 and n < j:
        raise ValueError("j out of range")
    p = n - 1 + (1 if j >= 1 else 0)
    ang = _abs_coordinate_moment(n) if j >= 1 else _sphere_area(n)
    total = 0.0
    for sgn in (1.0, -1.0):
        us, wu = uniform_nodes(1.0, U, max(1, int(np.ceil((U - 1) / u_step))), order)
        us = sgn * us
        for uu, wq in zip(us, wu):
            rho_max = np.sqrt(2.0 * np.exp(uu) * (np.cosh(U) - np.cosh(uu)))
            if rho_max <= 0:
                continue
            s = np.exp(uu) if uu >= 1 else 1.0
            eta_max = np.log(rho_max / s)
            lo = min(eta_min, eta_max - 1.0)
            eta, we = uniform_nodes(lo, eta_max, max(2, int(np.ceil((eta_max - lo) / eta_step))), order)
            rho = s * np.exp(eta)
            vals = rho ** (p + 1) * remainder_integrand(n, j, rho, uu, main_scale)
            total += wq * float(np.dot(we, vals))
    return ang * total


# ---------------------------------------------------------------------------
# Hardy-space atoms

def bump(t):
    """exp(-1/(1-t^2)) on |t| < 1, zero outside (t may be |x| for n > 1)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    inside = np.abs(t) < 1
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


@lru_cache(maxsize=None)
def _ball_rule(n: int, order: int):
    """Tensor Gauss-Legendre on [-1,1]^n carrying the normalized bump phi."""
    x, w = np.polynomial.legendre.leggauss(order)
    grids = np.meshgrid(*([x] * n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wts = np.ones(pts.shape[0])
    for g in np.meshgrid(*([w] * n), indexing="ij"):
        wts = wts * g.ravel()
    vals = bump(np.sqrt(np.sum(pts * pts, axis=-1))) * wts
    keep = vals > 0
    pts, vals = pts[keep], vals[keep]
    return pts, vals / vals.sum()


@lru_cache(maxsize=None)
def _line_rule(order: int):
    s, w = np.polynomial.legendre.leggauss(order)
    vals = bump(s) * w
    return s, vals / vals.sum()


def hardy_divergence(n: int, j: int, U: float, v_scale: float = 1.0,
                     order_z: int | None = None, order_s: int = 48,
                     order_u: int = 32, order_x: int = 48) -> float:
    """M(U) = int over U_j x [-U, -2] of |a_v * K| for the atom a_v = (phi(.+v) - phi) psi.

    K is K_j (j >= 1) or K0_tilde + K0 (j = 0, v = e_1).  On u <= -2 the
    convolution only sees K at heights u' <= -1, where both reduce to
    r_j(x')/u', so

        (a_v * K)(x,u) = int psi(s) B(x,s) / (u - s) ds,
        B(x,s) = int phi(z) [(r_j)_(e^s)(x - z + v) - (r_j)_(e^s)(x - z)] dz.

    U_j = {|x_i| >= 100, |x|^2 - x_i^2 <= 1}, i = max(j, 1), integrated over
    the full unbounded strip (x_i -> 100/tau).
    """
    if U < 4:
        raise ValueError("U must be >= 4")
    if n not in (1, 2, 3):
        raise ValueError("hardy_divergence supports n in 1..3")
    axis = max(j, 1) - 1
    v = np.zeros(n)
    v[axis] = v_scale
    if order_z is None:
        order_z = {1: 48, 2: 32, 3: 20}[n]
    zp, zw = _ball_rule(n, order_z)
    sp_, sw = _line_rule(order_s)
    lam = np.exp(sp_)
    # x nodes: x_axis = +-100/tau, transverse coordinates in the unit ball
    tau, tw = panel_nodes(np.array([0.0, 0.25, 0.5, 1.0]), order_x)
    xa = 100.0 / tau
    xw = tw * 100.0 / tau ** 2
    if n == 1:
        tp, tq = np.zeros((1, 0)), np.ones(1)
    else:
        # flat tensor rule restricted to the transverse unit ball
        g, gw = np.polynomial.legendre.leggauss(16)
        grids = np.meshgrid(*([g] * (n - 1)), indexing="ij")
        pts = np.stack([q.ravel() for q in grids], axis=-1)
        wts = np.ones(pts.shape[0])
        for q in np.meshgrid(*([gw] * (n - 1)), indexing="ij"):
            wts = wts * q.ravel()
        inside = np.sum(pts * pts, axis=-1) <= 1
        tp, tq = pts[inside], wts[inside]
    ub, uw = panel_nodes(np.array([np.log(2.0), np.log(U)]), order_u)
    uu = -np.exp(ub)
    uw = uw * np.exp(ub)
    total = 0.0
    for sign in (1.0, -1.0):
        for xi, wxi in zip(sign * xa, xw):
            xs = np.zeros((tp.shape[0], n))
            xs[:, axis] = xi
            others = [i for i in range(n) if i != axis]
            xs[:, others] = tp
            # B(x, s) for all transverse x and all s nodes
            y = xs[:, None, None, :] - zp[None, None, :, :]
            lam_b = lam[None, :, None]
            diff = rescaled(j, y + v, lam_b) - rescaled(j, y, lam_b)
            B = diff @ zw                                   # (transverse, s)
            conv = (B * sw) @ (1.0 / (uu[None, :] - sp_[:, None]))   # (transverse, u)
            total += wxi * float(tq @ (np.abs(conv) @ uw))
    return total
