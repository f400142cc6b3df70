"""Operator-valued Fourier symbols of the far-field kernels.

The partial Fourier transform in x turns convolution by K on G into the
family of integral operators M_K(xi) on functions of u, with kernel
H_K^xi(u, u') = (F K)(e^{u'} xi, u - u').  This module builds those
operators for K0, Kj and K0_tilde from the symbols S_{alpha,j}, estimates
weighted L^2 norms, and checks the representation-theoretic identity
sigma^xi(K) = M_K(xi) on sampled kernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gamma, pi

import numpy as np
import sympy
from scipy.special import k0, k1
from scipy.interpolate import CubicSpline, RegularGridInterpolator
from scipy.sparse.linalg import LinearOperator, eigsh

from .group import SampledFunction, _boundary_max
from .riesz import KernelId

MULTIPLIER_VARIANTS = ("K0", "Kj", "K0_tilde")

# FFT grid per dimension: (half extent L, spacing h).  The band |t| <= pi/(2h)
# is the resolved part of the spectrum.
FFT_GRID = {1: (2048.0, 1 / 64), 2: (2048.0, 1 / 64), 3: (512.0, 1 / 64)}
EDGE_ZERO = 1e-12


class OutsideBandError(ValueError):
    """The requested frequency is past the resolved band and the symbol is not negligible there."""


# ---------------------------------------------------------------------------
# symbols

@lru_cache(maxsize=None)
def r_alpha_expression(n: int, j: int, alpha: tuple):
    """Symbolic r_{alpha,j} = (-1)^{|alpha|} d^alpha (x^alpha r_j) and its variables."""
    xs = sympy.symbols(f"x1:{n + 1}", real=True)
    r = (1 + sum(x ** 2 for x in xs)) ** (sympy.Rational(-(n + 2), 2))
    if j:
        r = xs[j - 1] * r
    mono = sympy.Integer(1)
    for x, a in zip(xs, alpha):
        mono = mono * x ** a
    expr = mono * r
    for x, a in zip(xs, alpha):
        if a:
            expr = sympy.diff(expr, x, a)
    expr = sympy.simplify((-1) ** sum(alpha) * expr)
    return xs, expr


@lru_cache(maxsize=None)
def r_alpha_function(n: int, j: int, alpha: tuple):
    xs, expr = r_alpha_expression(n, j, alpha)
    f = sympy.lambdify(xs, expr, "numpy")
    return lambda x: np.broadcast_to(f(*[x[..., i] for i in range(n)]), x.shape[:-1])


def _orthonormal_complement(e):
    n = e.size
    q, _ = np.linalg.qr(np.column_stack([e, np.eye(n)]))
    basis = q[:, 1:n]
    return basis


def _projection(n, j, alpha, e, y):
    """P(y) = int over the hyperplane orthogonal to e of r_{alpha,j}(y e + z) dz."""
    f = r_alpha_function(n, j, alpha)
    if n == 1:
        return np.array(f(y[:, None] * e[None, :]), dtype=float)
    c = np.sqrt(1.0 + y * y)
    basis = _orthonormal_complement(e)
    # trapezoid in tau is spectrally accurate: the integrand is analytic in a
    # strip of half-width pi/2 around the real tau axis
    htau = 0.25
    if n == 2:
        tau = np.arange(-18.0, 18.0 + htau / 2, htau)
        out = np.zeros_like(y)
        for t in tau:
            z = c * np.sinh(t)
            pts = y[:, None] * e[None, :] + z[:, None] * basis[:, 0][None, :]
            out += f(pts) * c * np.cosh(t)
        return out * htau
    tau = np.arange(-22.0, 14.0 + htau / 2, htau)
    nth = 12  # the angular dependence is a trigonometric polynomial of low degree
    th = 2 * pi * np.arange(nth) / nth
    out = np.zeros_like(y)
    for t in tau:
        rho = c * np.exp(t)
        for a in th:
            d = np.cos(a) * basis[:, 0] + np.sin(a) * basis[:, 1]
            pts = y[:, None] * e[None, :] + rho[:, None] * d[None, :]
            out += f(pts) * rho * rho
    return out * htau * (2 * pi / nth)


@dataclass(frozen=True)
class SymbolFunction:
    """S_{alpha,j}(t e) for real t along a fixed unit direction e.

    Computed as the 1-D discrete Fourier transform of the projection of
    r_{alpha,j} onto the line R e (Fourier slice theorem; for n = 1 the
    projection is r_{alpha,j} itself), then interpolated by cubic splines.
    """
    n: int
    j: int
    alpha: tuple
    direction: tuple = None
    t: np.ndarray = field(init=False, repr=False)
    residual: np.ndarray = field(init=False, repr=False)
    tails: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError("symbols are supported for n in 1..3")
        alpha = tuple(int(a) for a in self.alpha)
        if len(alpha) != self.n or any(a not in (0, 1) for a in alpha):
            raise ValueError("alpha must be a 0/1 multi-index of length n")
        if not 0 <= self.j <= self.n:
            raise ValueError("j must lie in 0..n")
        e = np.zeros(self.n) if self.direction is None else np.asarray(self.direction, float)
        if self.direction is None:
            e[0] = 1.0
        if e.shape != (self.n,) or np.linalg.norm(e) == 0:
            raise ValueError("direction must be a nonzero vector in R^n")
        e = e / np.linalg.norm(e)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "direction", tuple(e.tolist()))
        t, res, A, B = _slice_transform(self.n, self.j, alpha, tuple(e.tolist()))
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "residual", res)
        object.__setattr__(self, "tails", (A, B))

    def _models(self, t):
        to, te = _model_transforms(t)
        return self.tails[0] * to + self.tails[1] * te

    @property
    def values(self) -> np.ndarray:
        """S on the FFT frequencies t."""
        return self.residual + self._models(self.t)

    @property
    def band(self) -> float:
        return float(self.t[-1])

    @property
    def _splines(self):
        return _spline_cache(self)

    def along(self, t):
        """S at the points t * direction."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        inside = np.abs(t) <= self.band
        if not np.all(inside):
            edge = np.max(np.abs(self.values[-max(2, self.t.size // 20):]))
            if edge >= EDGE_ZERO:
                raise OutsideBandError(
                    f"|t| = {np.max(np.abs(t)):.4g} exceeds the resolved band {self.band:.4g}")
        re, im = self._splines
        ti = t[inside]
        a = np.abs(ti)
        # conjugate symmetry: S(-t) = conj S(t) for real profiles
        vals = re(a) + 1j * np.sign(ti) * im(a)
        vals = np.where(ti == 0, re(0.0) + 0j, vals)
        out[inside] = vals + self._models(ti)
        return out

    def __call__(self, xi):
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if self.n == 1:
            return self.along(xi.reshape(-1) * self.direction[0]).reshape(xi.shape)
        e = np.asarray(self.direction)
        t = xi @ e
        if np.max(np.abs(xi - t[..., None] * e)) > 1e-12 * max(1.0, np.max(np.abs(xi))):
            raise ValueError("xi does not lie on this symbol's direction")
        return self.along(t)


_SPLINES: dict = {}


def _spline_cache(sf: SymbolFunction):
    key = (sf.n, sf.j, sf.alpha, sf.direction)
    if key not in _SPLINES:
        pos = sf.t >= 0
        t = sf.t[pos]
        _SPLINES[key] = (CubicSpline(t, sf.residual[pos].real),
                         CubicSpline(t, sf.residual[pos].imag))
    return _SPLINES[key]


MODEL_SCALE = 2.0


def _tail_coefficients(n, j, alpha, e, L):
    """A, B in P(y) ~ A sgn(y)/y^2 + B/|y|^3, by Richardson extrapolation from L and 2L."""
    y = np.array([-2 * L, -L, L, 2 * L])
    P = _projection(n, j, alpha, e, y)
    odd = 0.5 * (P[2:] - P[1::-1])   # at L, 2L
    even = 0.5 * (P[2:] + P[1::-1])
    A = (4 * odd[1] * (2 * L) ** 2 - odd[0] * L ** 2) / 3
    B = (4 * even[1] * (2 * L) ** 3 - even[0] * L ** 3) / 3
    return A, B


def _models(y, a=MODEL_SCALE):
    q = (a * a + y * y) ** -1.5
    return y * q, q


def _model_transforms(t, a=MODEL_SCALE):
    at = np.abs(t)
    with np.errstate(invalid="ignore"):
        odd = np.where(at > 0, -2j * t * k0(a * at), 0.0)
        even = np.where(at > 0, (2 / a) * at * k1(a * at), 2 / a ** 2)
    return odd, even


@lru_cache(maxsize=None)
def _slice_transform(n, j, alpha, e):
    """Transform of the projection with its algebraic tails removed analytically.

    The tails A sgn(y)/y^2 + B/|y|^3 are carried by two model functions with
    Bessel-function transforms; the remainder decays like |y|^{-4} and is
    handled by the FFT.
    """
    L, h = FFT_GRID[n]
    e = np.asarray(e)
    N = int(round(2 * L / h))
    y = (np.arange(N) - N // 2) * h
    A, B = _tail_coefficients(n, j, alpha, e, L)
    mo, me = _models(y)
    P = _projection(n, j, alpha, e, y) - A * mo - B * me
    # y[0] = -L pairs with the absent +L: use the periodic average
    endL = _projection(n, j, alpha, e, np.array([L]))[0] - A * _models(L)[0] - B * _models(L)[1]
    P[0] = 0.5 * (P[0] + endL)
    F = h * np.fft.fftshift(np.fft.fft(np.fft.ifftshift(P)))
    t = np.fft.fftshift(np.fft.fftfreq(N, d=h)) * 2 * pi
    band = pi / (2 * h)
    keep = np.abs(t) <= band
    t, F = t[keep], F[keep]
    t.setflags(write=False)
    F.setflags(write=False)
    return t, F, float(A), float(B)


@lru_cache(maxsize=None)
def symbol_function(n: int, j: int, alpha: tuple, direction: tuple | None = None) -> SymbolFunction:
    return SymbolFunction(n, j, tuple(alpha), direction)


def symbol_S(n: int, alpha, j: int, xi):
    """S_{alpha,j}(xi); xi is a scalar (n = 1) or points on one ray (n > 1)."""
    xi = np.asarray(xi, dtype=float)
    if n == 1:
        return symbol_function(1, j, tuple(alpha))(xi.reshape(-1)).reshape(xi.shape)
    pts = xi.reshape(-1, n)
    nz = pts[np.argmax(np.linalg.norm(pts, axis=1))]
    if np.linalg.norm(nz) == 0:
        return symbol_function(n, j, tuple(alpha))(pts).reshape(xi.shape[:-1])
    d = tuple((nz / np.linalg.norm(nz)).tolist())
    return symbol_function(n, j, tuple(alpha), d)(pts).reshape(xi.shape[:-1])


def fitted_decay_exponent(n: int, alpha, j: int, small=(2.0 ** -8, 2.0 ** -4),
                          large=(1.0, 16.0), points: int = 9) -> dict:
    """Log-log slopes of |S| (or |S - S(0)| for j = 0) at both ends of the spectrum.

    Returns the slope near 0, minus the slope at large |xi| and their minimum,
    the empirical epsilon.
    """
    sf = symbol_function(n, j, tuple(alpha))
    ts = np.geomspace(*small, points)
    tl = np.geomspace(*large, points)
    s0 = sf.along(np.array([0.0]))[0] if j == 0 else 0.0
    near = np.abs(sf.along(ts) - s0)
    far = np.abs(sf.along(tl))
    slope_small = float(np.polyfit(np.log(ts), np.log(near), 1)[0])
    slope_large = -float(np.polyfit(np.log(tl), np.log(far), 1)[0])
    return {"small": slope_small, "large": slope_large, "eps": min(slope_small, slope_large)}


# ---------------------------------------------------------------------------
# operators on the u-line

@dataclass(frozen=True)
class UGrid:
    """Midpoint grid: nu cells of width du covering [u_min, u_max]."""
    u_min: float
    u_max: float
    nu: int

    def __post_init__(self):
        if self.nu < 2 or self.u_max <= self.u_min:
            raise ValueError("need nu >= 2 and u_max > u_min")

    @property
    def du(self) -> float:
        return (self.u_max - self.u_min) / self.nu

    @property
    def nodes(self) -> np.ndarray:
        return self.u_min + (np.arange(self.nu) + 0.5) * self.du

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.nu, self.du)


@dataclass(frozen=True)
class IntegralOperator1D:
    grid: UGrid
    kernel_matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.kernel_matrix)
        if m.shape != (self.grid.nu, self.grid.nu):
            raise ValueError("kernel matrix does not match the grid")
        if not np.all(np.isfinite(m)):
            raise ValueError("kernel matrix has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "kernel_matrix", m)

    @property
    def quad_weights(self):
        return self.grid.weights

    def apply(self, phi):
        return self.kernel_matrix @ (self.quad_weights * np.asarray(phi))


def _offsets(grid: UGrid):
    i = np.arange(grid.nu)
    return i[:, None] - i[None, :]  # u - u' in units of du


def _far(d, du, sign):
    """Indicator of sign*(u - u') >= 1 on integer offsets, tolerant to rounding."""
    return sign * d * du >= 1.0 - 1e-9


def build_multiplier_operator(kid: KernelId, xi, alpha, grid: UGrid) -> IntegralOperator1D:
    """Matrix of xi^alpha d^alpha H_K^xi on the grid, from the symbol closed forms."""
    if kid.variant not in MULTIPLIER_VARIANTS:
        raise ValueError(f"variant must be one of {MULTIPLIER_VARIANTS}")
    n = kid.n
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape != (n,):
        raise ValueError("xi must have n components")
    size = float(np.linalg.norm(xi))
    if size == 0:
        raise ValueError("xi must be nonzero")
    j = 0 if kid.variant in ("K0", "K0_tilde") else kid.j
    sf = symbol_function(n, j, tuple(int(a) for a in alpha), tuple((xi / size).tolist()))
    u = grid.nodes
    S = sf.along(np.exp(u) * size)
    d = _offsets(grid)
    du = grid.du
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(d != 0, 1.0 / (d * du), 0.0)
    if kid.variant == "K0":
        H = (S[:, None] - S[None, :]) * np.where(_far(d, du, 1), inv, 0.0)
    elif kid.variant == "Kj":
        H = S[None, :] * np.where(_far(d, du, -1), inv, 0.0)
    else:
        H = S[None, :] * np.where(_far(d, du, 1) | _far(d, du, -1), inv, 0.0)
    if np.all(H.imag == 0):
        H = H.real
    return IntegralOperator1D(grid, H)


def scaling_covariance_check(kid: KernelId, xi, v: float, grid: UGrid, alpha=None) -> float:
    """max |H^{e^v xi}(u_i, u_k) - H^{xi}(u_i + v, u_k + v)| on the common interior."""
    m = v / grid.du
    if abs(m - round(m)) > 1e-9:
        raise ValueError("v must be an integer multiple of the grid spacing")
    m = int(round(m))
    alpha = (0,) * kid.n if alpha is None else alpha
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    A = build_multiplier_operator(kid, np.exp(v) * xi, alpha, grid).kernel_matrix
    B = build_multiplier_operator(kid, xi, alpha, grid).kernel_matrix
    lo, hi = max(0, -m), grid.nu - max(0, m)
    if hi <= lo:
        raise ValueError("shift leaves no common interior")
    return float(np.max(np.abs(A[lo:hi, lo:hi] - B[lo + m:hi + m, lo + m:hi + m])))


# ---------------------------------------------------------------------------
# weights

@dataclass(frozen=True)
class MuckenhouptWeight:
    """A weight sampled as cell averages on a UGrid.

    ``descriptor`` is ``"constant"``, ``("power", a)`` with -1 < a < 1, or
    ``("samples", array)``.  Power weights are averaged exactly over each
    cell, so the samples stay positive and finite even on a cell touching 0.
    """
    grid: UGrid
    descriptor: object = "constant"
    samples: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = self.grid
        d = self.descriptor
        if d == "constant":
            s = np.ones(g.nu)
        elif isinstance(d, tuple) and d[0] == "power":
            a = float(d[1])
            if not -1 < a:
                raise ValueError("power weights need a > -1 to be locally integrable")
            edges = g.u_min + np.arange(g.nu + 1) * g.du
            anti = np.sign(edges) * np.abs(edges) ** (a + 1) / (a + 1)
            s = np.diff(anti) / g.du
        elif isinstance(d, tuple) and d[0] == "samples":
            s = np.asarray(d[1], dtype=float).copy()
            if s.shape != (g.nu,):
                raise ValueError("sample count does not match the grid")
        else:
            raise ValueError(f"unknown weight descriptor {d!r}")
        if not np.all(np.isfinite(s)) or np.any(s <= 0):
            raise ValueError("weight samples must be positive and finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def inverse(self) -> "MuckenhouptWeight":
        # exact for the dual pairing used by the operators: 1/w sampled pointwise
        return MuckenhouptWeight(self.grid, ("samples", 1.0 / self.samples))

    @property
    def a2_estimate(self) -> float:
        return a2_characteristic(self)


def a2_characteristic(w: MuckenhouptWeight) -> float:
    """sup over windows of 2^k consecutive cells (every start position) of avg(w) avg(1/w)."""
    s = w.samples
    c1 = np.concatenate([[0.0], np.cumsum(s)])
    c2 = np.concatenate([[0.0], np.cumsum(1.0 / s)])
    best = 1.0
    length = 1
    while length <= s.size:
        a = (c1[length:] - c1[:-length]) / length
        b = (c2[length:] - c2[:-length]) / length
        best = max(best, float(np.max(a * b)))
        length *= 2
    return best


# ---------------------------------------------------------------------------
# norms

class ConvergenceError(RuntimeError):
    pass


def _similarity(op: IntegralOperator1D, w: MuckenhouptWeight):
    if w.grid != op.grid:
        raise ValueError("operator and weight grids differ")
    q = op.quad_weights
    dq = w.samples * q
    return np.sqrt(dq)[:, None] * op.kernel_matrix * (q / np.sqrt(dq))[None, :]


def weighted_opnorm(op: IntegralOperator1D, w: MuckenhouptWeight | None = None,
                    method: str = "lanczos", tol: float = 1e-8,
                    max_iter: int = 20000, seed: int = 0) -> float:
    """Norm of op on the discrete L^2(w): top singular value of D^{1/2} H Q D^{-1/2}.

    ``method="power"`` runs plain power iteration on the Gram matrix;
    ``"lanczos"`` hands the same Gram operator to ARPACK; ``"dense"`` uses a
    full SVD.
    """
    w = w or MuckenhouptWeight(op.grid)
    A = _similarity(op, w)
    if method == "dense":
        return float(np.linalg.svd(A, compute_uv=False)[0])
    if method == "lanczos":
        B = LinearOperator(A.shape, matvec=lambda v: A.conj().T @ (A @ v),
                           dtype=np.result_type(A.dtype, float))
        v0 = np.random.default_rng(seed).standard_normal(A.shape[0])
        vals = eigsh(B, k=1, which="LA", tol=tol * 1e-2, v0=v0, return_eigenvectors=False)
        return float(np.sqrt(max(vals[0].real, 0.0)))
    if method != "power":
        raise ValueError(f"unknown method {method!r}")
    v = np.random.default_rng(seed).standard_normal(A.shape[0]).astype(A.dtype)
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        g = A.conj().T @ (A @ v)
        lam = float(np.vdot(v, g).real)
        if lam == 0:
            return 0.0
        # a residual of r puts an eigenvalue of the Gram matrix within r of lam
        if np.linalg.norm(g - lam * v) <= tol * lam:
            return float(np.sqrt(lam))
        v = g / np.linalg.norm(g)
    raise ConvergenceError("power iteration did not converge within the budget")


def model_kernel(kind: str, grid: UGrid, eps: float | None = None) -> IntegralOperator1D:
    u = grid.nodes
    U, Up = np.meshgrid(u, u, indexing="ij")
    if kind == "W":
        H = 1.0 / np.sqrt(U * U + Up * Up)
    elif kind in ("Zeps", "ZepsStar"):
        if eps is None or eps <= 0:
            raise ValueError("Z kernels need eps > 0")
        d = _offsets(grid)
        far = _far(d, grid.du, 1) | _far(d, grid.du, -1)
        with np.errstate(divide="ignore"):
            base = np.where(far, 1.0 / np.abs(d * grid.du), 0.0)
        H = base * np.exp(-eps * np.abs(U if kind == "Zeps" else Up))
    else:
        raise ValueError(f"unknown model kernel {kind!r}")
    return IntegralOperator1D(grid, H)


def model_kernel_opnorm(kind: str, eps: float | None, w: MuckenhouptWeight, **kw) -> float:
    return weighted_opnorm(model_kernel(kind, w.grid, eps), w, **kw)


def schur_bound(op: IntegralOperator1D) -> float:
    """sqrt(max row sum * max column sum) of |H| against the quadrature weights."""
    A = np.abs(op.kernel_matrix) * op.quad_weights[None, :]
    return float(np.sqrt(np.max(A.sum(axis=1)) * np.max(A.sum(axis=0))))


def schur_bound_W(grid: UGrid, delta: float = 0.5) -> float:
    """Schur test for W with test function |t|^{-delta}, evaluated on the grid.

    sup_u |u|^delta sum_{u'} W(u,u') |u'|^{-delta} du' (W is symmetric, so one
    side suffices).  For delta = 1/2 on the whole line this is B(1/4, 1/4).
    """
    op = model_kernel("W", grid)
    u = grid.nodes
    t = np.abs(u) ** (-delta)
    row = (op.kernel_matrix * (t * grid.du)[None, :]).sum(axis=1)
    return float(np.max(row / t))


def w_continuum_norm() -> float:
    """Norm of W on L^2(R): its Mellin symbol at the critical line, Gamma(1/4)^2/Gamma(1/2)."""
    return gamma(0.25) ** 2 / gamma(0.5)


# ---------------------------------------------------------------------------
# representation sigma^xi

def _phi_on(phi_grid: UGrid, phi, s):
    """phi at s, assuming s lands on grid nodes (zero outside)."""
    k = (s - phi_grid.nodes[0]) / phi_grid.du
    ki = np.rint(k).astype(int)
    if np.max(np.abs(k - ki)) > 1e-6:
        raise ValueError("kernel u-grid and phi grid are not aligned")
    inside = (ki >= 0) & (ki < phi_grid.nu)
    out = np.zeros(s.shape, dtype=complex)
    out[inside] = np.asarray(phi)[ki[inside]]
    return out


def _check_integrable(K: SampledFunction, threshold: float):
    if K.grid.n not in (1, 2):
        raise ValueError("representation_apply supports n in 1..2")
    m = K.l1()
    if m == 0:
        return
    if _boundary_max(K.values) > threshold * np.max(np.abs(K.values)):
        raise ValueError("K does not decay at the grid boundary; not treated as integrable")


def representation_apply(K: SampledFunction, xi, phi_grid: UGrid, phi,
                         route: str = "direct", pad: int = 8,
                         threshold: float = 1e-10) -> np.ndarray:
    """sigma^xi(K) phi on the nodes of ``phi_grid``.

    route "direct": sum over the sample points of K(x,u) e^{-i e^{s-u} xi.x} phi(s-u).
    route "fourier": FFT of K in x, cubic interpolation at e^{s'} xi, then
    the integral operator with kernel (F K)(e^{s'} xi, s - s').
    K's u-axis must have the spacing of ``phi_grid`` and be aligned with it.
    """
    _check_integrable(K, threshold)
    n = K.grid.n
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape != (n,):
        raise ValueError("xi must have n components")
    if abs(K.grid.du - phi_grid.du) > 1e-12 * phi_grid.du:
        raise ValueError("kernel and phi grids need equal u spacing")
    x, _ = K.grid.mesh()
    wts = K.grid.trapezoid_weights()
    uax = K.grid.u_axis()
    s = phi_grid.nodes
    Kw = K.values * wts  # (..., nu)
    out = np.zeros(s.size, dtype=complex)
    if route == "direct":
        xs = x[..., 0, :].reshape(-1, n)  # x nodes (u index dropped)
        Kx = Kw.reshape(-1, uax.size)
        phase_dir = xs @ xi
        for i, si in enumerate(s):
            ph = _phi_on(phi_grid, phi, si - uax)
            live = ph != 0
            if not np.any(live):
                continue
            lam = np.exp(si - uax[live])
            E = np.exp(-1j * phase_dir[:, None] * lam[None, :])
            out[i] = np.sum(Kx[:, live] * E * ph[live][None, :])
        return out
    if route != "fourier":
        raise ValueError(f"unknown route {route!r}")
    # partial Fourier transform of K in x on a zero-padded grid
    axes = K.grid.x_axes()
    dx = K.grid.dx
    shape = tuple(pad * c for c in K.grid.nx)
    # trapezoid end weights are already in Kw; divide the x part back out for the FFT sum
    wx = wts / K.grid.du
    big = np.zeros(shape + (uax.size,), dtype=complex)
    big[tuple(slice(0, c) for c in K.grid.nx)] = K.values * wx
    FK = np.fft.fftn(big, axes=tuple(range(n)))
    freqs = [2 * pi * np.fft.fftfreq(c, d=h) for c, h in zip(shape, dx)]
    # phase for the grid origin x_min
    for ax, (f, a) in enumerate(zip(freqs, axes)):
        shp = [1] * (n + 1)
        shp[ax] = f.size
        FK = FK * np.exp(-1j * f * a[0]).reshape(shp)
    FK = np.fft.fftshift(FK, axes=tuple(range(n)))
    freqs = [np.fft.fftshift(f) for f in freqs]
    eta = np.exp(s)[:, None] * xi[None, :]  # (ns, n)
    # frequencies past half the Nyquist limit are treated as unresolved: F K = 0 there
    band = min(pi / (2 * h) for h in dx)
    ok = np.all(np.abs(eta) <= band, axis=1)
    Fe = np.zeros((s.size, uax.size), dtype=complex)  # F K(e^{s'} xi, u_b)
    if n == 1:
        re = CubicSpline(freqs[0], FK.real, axis=0)
        im = CubicSpline(freqs[0], FK.imag, axis=0)
        Fe[ok] = re(eta[ok, 0]) + 1j * im(eta[ok, 0])
    else:
        for b in range(uax.size):
            ri = RegularGridInterpolator(freqs, FK[..., b].real, method="cubic")
            ii = RegularGridInterpolator(freqs, FK[..., b].imag, method="cubic")
            Fe[ok, b] = ri(eta[ok]) + 1j * ii(eta[ok])
    # (sigma K phi)(s_i) = sum_{s'} F K(e^{s'} xi, s_i - s') phi(s') du
    uk = uax / phi_grid.du
    off = np.rint(uk).astype(int)
    if np.max(np.abs(uk - off)) > 1e-6:
        raise ValueError("kernel u-nodes must be integer multiples of the spacing")
    for i in range(s.size):
        # s' = s_i - u_b  ->  phi node index i - off_b
        kp = i - off
        ok = (kp >= 0) & (kp < s.size)
        out[i] = np.sum(Fe[kp[ok], np.nonzero(ok)[0]] * np.asarray(phi)[kp[ok]]) * K.grid.du
    return out
