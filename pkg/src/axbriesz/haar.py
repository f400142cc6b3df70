"""Haar-like decompositions and the discrete flow operator on R^n x Z.

Everything here is piecewise constant in the variable that matters, so level
sets are measured exactly rather than sampled.  The sums over k in Z are
infinite; they are split into an explicit window near the support and a
tail on which |sum_h G_h / (h - k)| is monotone in k and can be bisected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import zeta

from .group import GridSpec, SampledFunction, _boundary_max
from .quadrature import panel_nodes
from .riesz import r_profile

ALPHA_POINTS = 60
ALPHA_SPAN = 1e-6
ALPHA_SHRINK = 1.0 - 1e-9


# ---------------------------------------------------------------------------
# partitions and Haar-like functions

@dataclass(frozen=True)
class HaarPartition:
    """Intervals [offset + k*scale, offset + (k+1)*scale), k in Z."""
    scale: float
    offset: float = 0.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if not 0 <= self.offset < self.scale:
            raise ValueError("offset must lie in [0, scale)")

    def interval(self, k: int) -> tuple[float, float]:
        a = self.offset + k * self.scale
        return a, a + self.scale

    def index(self, t):
        return np.floor((np.asarray(t, dtype=float) - self.offset) / self.scale).astype(int)


def psi(a: float, b: float, t):
    """|I|^{-1}(chi_{I^-} - chi_{I^+}) for I = [a, b)."""
    t = np.asarray(t, dtype=float)
    mid = 0.5 * (a + b)
    L = b - a
    return np.where((t >= a) & (t < mid), 1.0 / L, 0.0) - np.where((t >= mid) & (t < b), 1.0 / L, 0.0)


@dataclass(frozen=True)
class HaarLikeFunction:
    partition: HaarPartition
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", {int(k): float(v) for k, v in self.coeffs.items() if v != 0})

    @property
    def scale(self) -> float:
        return self.partition.scale

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = self.partition.index(t)
        a = np.array([self.coeffs.get(int(i), 0.0) for i in k.ravel()]).reshape(k.shape)
        lo = self.partition.offset + k * self.scale
        upper = t >= lo + 0.5 * self.scale
        return np.where(upper, -a, a) / self.scale

    def l1(self) -> float:
        return float(sum(abs(v) for v in self.coeffs.values()))

    def breakpoints(self) -> np.ndarray:
        pts = []
        for k in self.coeffs:
            a, b = self.partition.interval(k)
            pts += [a, 0.5 * (a + b), b]
        return np.unique(np.array(pts, dtype=float))


def basis_moments(a: float, b: float) -> tuple[float, float]:
    """(int psi_I, ||psi_I||_1) by piecewise-constant arithmetic."""
    L = b - a
    half = 0.5 * L
    return half / L - half / L, half / L + half / L


def self_coefficient(a: float, b: float) -> float:
    """c_I(psi_I) = |I| int psi_I^2, by exact arithmetic on the two halves."""
    L = b - a
    half = 0.5 * L
    return L * (half / L ** 2 + half / L ** 2)


# ---------------------------------------------------------------------------
# the nested family and coefficient envelopes

@dataclass(frozen=True)
class DyadicFamily:
    """Nested intervals D_{mk} of length 2^{-m}, m, k in Z.

    D_{mk} = [2^{-m}(k + a_m), 2^{-m}(k + 1 + a_m)) with a_m = shift * (-1)^m.
    With shift = 1/3 the levels nest (2 a_m - a_{m+1} is an integer) and 0 is
    never an endpoint; shift = 0 gives the plain dyadic grid.
    """
    eps: float = 0.5
    C: float = 1.0
    shift: float = 1.0 / 3.0

    def __post_init__(self):
        if self.shift not in (0.0, 1.0 / 3.0):
            raise ValueError("shift must be 0 or 1/3 for the levels to nest")

    def a(self, m: int) -> float:
        return self.shift * (-1) ** (m % 2)

    def interval(self, m: int, k: int) -> tuple[float, float]:
        L = 2.0 ** (-m)
        a = L * (k + self.a(m))
        return a, a + L

    def k_range(self, m: int, lo: float, hi: float) -> range:
        """Indices k with D_{mk} inside [lo, hi]."""
        L = 2.0 ** (-m)
        k0 = int(np.ceil(lo / L - self.a(m) - 1e-12))
        k1 = int(np.floor(hi / L - self.a(m) - 1 + 1e-12))
        return range(k0, k1 + 1)

    def window(self, M: int) -> tuple[float, float]:
        """The union of three consecutive coarsest intervals (level -M) around 0."""
        k = int(np.floor(-self.a(-M)))
        a, b = self.interval(-M, k)
        return a - (b - a), b + (b - a)

    def with_C(self, C: float) -> "DyadicFamily":
        return DyadicFamily(self.eps, C, self.shift)


def kappa(family: DyadicFamily, m, k):
    """C 2^{eps m} (1 + 2^m + |k|)^{-2-eps}."""
    m = np.asarray(m, dtype=float)
    k = np.asarray(k, dtype=float)
    return family.C * 2.0 ** (family.eps * m) * (1 + 2.0 ** m + np.abs(k)) ** (-2 - family.eps)


def kappa_partial_sums(family: DyadicFamily, delta: float, N: float, M_max: int = 200):
    """Partial sums over |m| <= M of sum_k ((1 + log_+ |I|)^N kappa(I))^delta.

    The k-sum is done in closed form with the Hurwitz zeta function.
    Returns (M values, partial sums, increments).
    """
    s = (2 + family.eps) * delta
    if s <= 1:
        raise ValueError("the k-sum diverges: need (2 + eps) delta > 1")

    def level(m):
        A = 1 + 2.0 ** m
        ksum = A ** (-s) + 2 * zeta(s, A + 1)
        logfac = (1 + max(0.0, -m * log(2))) ** (N * delta)
        return logfac * (family.C * 2.0 ** (family.eps * m)) ** delta * ksum

    Ms = np.arange(M_max + 1)
    sums = np.empty(M_max + 1)
    total = level(0)
    sums[0] = total
    for M in range(1, M_max + 1):
        total += level(M) + level(-M)
        sums[M] = total
    return Ms, sums, np.diff(sums)


def _cell_integrals(rho, edges, order=8):
    x, w = panel_nodes(edges, order)
    return (rho(x) * w).reshape(-1, order).sum(axis=1)


def haar_coefficients(rho, family: DyadicFamily, M: int, order: int = 8) -> dict:
    """c_I = |I| int psi_I rho for |m| <= M and I inside the level -M window.

    The finest cells (level M + 1, halves of level-M intervals) are integrated
    by Gauss-Legendre and every coefficient is a difference of two partial
    sums of those cell integrals.
    """
    lo, hi = family.window(M)
    fine = M + 1
    ks = family.k_range(fine, lo, hi)
    edges = np.array([family.interval(fine, k)[0] for k in ks] + [family.interval(fine, ks[-1])[1]])
    cum = np.concatenate([[0.0], np.cumsum(_cell_integrals(rho, edges, order))])
    L0 = 2.0 ** (-fine)

    def cum_at(t):
        i = int(round((t - edges[0]) / L0))
        if abs(edges[0] + i * L0 - t) > 1e-9 * max(1.0, abs(t)):
            raise AssertionError("family levels are not nested")
        return cum[i]

    out = {}
    for m in range(-M, M + 1):
        for k in family.k_range(m, lo, hi):
            a, b = family.interval(m, k)
            mid = 0.5 * (a + b)
            out[(m, k)] = (cum_at(mid) - cum_at(a)) - (cum_at(b) - cum_at(mid))
    return out


def reconstruct(coeffs: dict, family: DyadicFamily, t):
    out = np.zeros_like(np.asarray(t, dtype=float))
    for (m, k), c in coeffs.items():
        a, b = family.interval(m, k)
        out += c * psi(a, b, t)
    return out


def reconstruction_error(rho, family: DyadicFamily, M: int, span: float = 64.0) -> float:
    """L^1 distance between rho and its truncated Haar series (fine quadrature on [-span, span])."""
    coeffs = haar_coefficients(rho, family, M)
    # panel edges at every breakpoint of the series keep the quadrature exact on the steps
    lo, hi = family.window(M)
    fine = M + 1
    ks = family.k_range(fine, lo, hi)
    pts = [family.interval(fine, k)[0] for k in ks] + [family.interval(fine, ks[-1])[1]]
    pts = np.array(sorted(set(pts) | {-span, span}))
    pts = pts[(pts >= min(-span, lo)) & (pts <= max(span, hi))]
    x, w = panel_nodes(pts, 8)
    err = float(np.dot(w, np.abs(rho(x) - reconstruct(coeffs, family, x))))
    # rho outside the quadrature span
    tail_x, tail_w = panel_nodes(np.geomspace(max(span, hi), 1e8, 200), 8)
    err += float(np.dot(tail_w, np.abs(rho(tail_x)) + np.abs(rho(-tail_x))))
    return err


def fit_envelope_constant(coeff_sets, family: DyadicFamily) -> float:
    """Smallest C with |c_I| <= kappa_eps(I) on every supplied coefficient map."""
    base = family.with_C(1.0)
    best = 0.0
    for coeffs in coeff_sets:
        for (m, k), c in coeffs.items():
            best = max(best, abs(c) / float(kappa(base, m, k)))
    return best


def envelope_violations(coeffs: dict, family: DyadicFamily) -> int:
    return sum(1 for (m, k), c in coeffs.items() if abs(c) > kappa(family, m, k))


# ---------------------------------------------------------------------------
# flow sums  S(p, k) = sum_{h >= k+1} G_h(p) / (h - k)

class FlowSum:
    """A function on (pieces) x Z, constant on each piece, with exact level sets.

    ``G`` has shape (H, P): the value of the h-th summand on piece p, for
    the consecutive heights ``h0, h0 + 1, ..., h0 + H - 1``; ``weights`` has
    the measure of each piece.
    """

    def __init__(self, h0: int, G, weights, explicit: int = 64):
        self.h0 = int(h0)
        self.G = np.atleast_2d(np.asarray(G, dtype=float))
        self.weights = np.asarray(weights, dtype=float)
        if self.G.shape[1] != self.weights.size:
            raise ValueError("G and weights disagree on the number of pieces")
        self.H = self.G.shape[0]
        self.explicit = explicit
        self.hs = self.h0 + np.arange(self.H)

    def value(self, k: int) -> np.ndarray:
        """S(., k) on every piece."""
        d = self.hs - k
        use = d >= 1
        if not np.any(use):
            return np.zeros(self.weights.size)
        return (self.G[use] / d[use, None]).sum(axis=0)

    @property
    def k_explicit(self) -> range:
        top = self.h0 + self.H - 1  # S(., k) = 0 for k >= top
        return range(self.h0 - 1 - self.explicit, top)

    def _tail(self, D):
        """S at k = k_start - D for the tail start k_start below the explicit window."""
        k_start = self.h0 - 2 - self.explicit
        d = (self.hs[:, None] - k_start) + D[None, :]
        return (self.G / d).sum(axis=0)

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(self.value(k)))) for k in self.k_explicit)

    def measure_above(self, alpha: float) -> float:
        """|{(p, k) : |S(p, k)| > alpha}| with the piece measure times counting measure."""
        tail = self._tail_counts(alpha)
        if getattr(self, "_sorted", None) is None:
            mags = np.concatenate([np.abs(self.value(k)) for k in self.k_explicit])
            w = np.tile(self.weights, len(self.k_explicit))
            order = np.argsort(mags)
            self._sorted = (mags[order], np.cumsum(w[order][::-1])[::-1])
        mags, above = self._sorted
        i = np.searchsorted(mags, alpha, side="right")
        explicit = float(above[i]) if i < mags.size else 0.0
        return explicit + float(np.dot(tail, self.weights))

    _PROBE = np.r_[0.0, 2.0 ** np.arange(0, 31)]

    def _tail_counts(self, alpha):
        """Number of tail indices with |S| > alpha, per piece.

        Pieces whose tail is nonincreasing with a fixed sign along a geometric
        probe are bisected; the rest (a zero crossing far out) are counted
        exactly from the real roots of P -+ alpha Q, where S = P/Q.
        """
        P = self.weights.size
        out = np.zeros(P)
        k_start = self.h0 - 2 - self.explicit
        base = (self.hs - k_start)[:, None].astype(float)
        reach = (np.abs(self.G) / base).sum(axis=0)
        live = np.nonzero(reach > alpha)[0]
        if live.size == 0:
            return out
        G = self.G[:, live]
        vals = np.stack([(G / (base + d)).sum(axis=0) for d in self._PROBE])
        mag = np.abs(vals)
        tiny = 1e-14 * np.max(np.abs(G), axis=0) / (self.explicit + 1)
        mono = np.all((np.diff(mag, axis=0) <= 1e-12 * mag[:-1] + tiny) &
                      ((vals[1:] * vals[:-1] >= 0) | (mag[1:] <= tiny)), axis=0)
        for idx in live[~mono]:
            out[idx] = _exact_tail_count(self.G[:, idx], base[:, 0], alpha)
        sel = live[mono & (mag[0] > alpha)]
        if sel.size == 0:
            return out
        G = self.G[:, sel]
        # |S(D)| <= sum_h |G_h| / (h0 - k_start + D) brackets the last index above alpha
        lo = np.zeros(sel.size)
        hi = np.maximum(np.ceil(np.abs(G).sum(axis=0) / alpha - base[0, 0] + 2), 1.0)
        while np.any(hi - lo > 1):
            mid = np.floor(0.5 * (lo + hi))
            above = np.abs((G / (base + mid[None, :])).sum(axis=0)) > alpha
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        out[sel] = lo + 1  # D = 0 .. lo are all above alpha
        return out


def _exact_tail_count(g, base, alpha) -> int:
    """#{D in Z, D >= 0 : |sum_h g_h / (base_h + D)| > alpha} via polynomial roots."""
    nz = g != 0
    g, base = g[nz], base[nz]
    if g.size == 0:
        return 0
    Q = np.polynomial.polynomial.polyfromroots(-base)
    Pp = np.zeros(1)
    for i in range(g.size):
        Pp = np.polynomial.polynomial.polyadd(
            Pp, g[i] * np.polynomial.polynomial.polyfromroots(-np.delete(base, i)))
    d_max = np.ceil(np.abs(g).sum() / alpha - base.min()) + 1
    if d_max < 0:
        return 0
    cuts = {0.0, float(d_max)}
    for sgn in (1.0, -1.0):
        poly = np.polynomial.polynomial.polysub(Pp, sgn * alpha * Q)
        for r in np.polynomial.polynomial.polyroots(poly):
            if abs(r.imag) <= 1e-9 * max(1.0, abs(r.real)) and 0 <= r.real <= d_max:
                cuts.update((float(np.floor(r.real)), float(np.ceil(r.real))))
    cuts = np.array(sorted(cuts))

    def above(D):
        return abs(float(np.sum(g / (base + D)))) > alpha

    count = sum(above(c) for c in cuts)
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a > 1 and above(a + 1):
            count += int(b - a - 1)
    return int(count)


def key_sum(deltas: dict, beta: float = 1.0, explicit: int = 64) -> FlowSum:
    """S(t, k) = sum_{h >= k+1} Delta_h(t)/(h - k) for scale-beta 2^h Haar-like Delta_h."""
    if not deltas:
        return FlowSum(0, np.zeros((1, 1)), np.ones(1), explicit)
    for h, d in deltas.items():
        if not np.isclose(d.scale, beta * 2.0 ** h, rtol=1e-12, atol=0):
            raise ValueError(f"Delta_{h} has scale {d.scale}, expected {beta * 2.0 ** h}")
    hs = sorted(deltas)
    h0 = hs[0]
    H = hs[-1] - h0 + 1
    pts = np.unique(np.concatenate([deltas[h].breakpoints() for h in hs if deltas[h].coeffs]
                                   or [np.array([0.0, 1.0])]))
    mids = 0.5 * (pts[:-1] + pts[1:])
    G = np.zeros((H, mids.size))
    for h in hs:
        G[h - h0] = deltas[h](mids)
    fs = FlowSum(h0, G, np.diff(pts), explicit)
    fs.breakpoints = pts
    return fs


def random_haar_family(rng, scales: int = 10, per_scale: int = 20, beta: float = 1.0,
                       h0: int = 0) -> dict:
    """Scale beta 2^h Haar-like functions for h = h0 .. h0+scales-1, random offsets,
    ``per_scale`` consecutive intervals starting near the origin, normal coefficients."""
    out = {}
    for h in range(h0, h0 + scales):
        lam = beta * 2.0 ** h
        part = HaarPartition(lam, float(rng.uniform(0, lam)))
        start = int(rng.integers(-per_scale, 1))
        coeffs = {start + i: float(c) for i, c in enumerate(rng.standard_normal(per_scale))}
        out[h] = HaarLikeFunction(part, coeffs)
    return out


# ---------------------------------------------------------------------------
# weak-type quotients

@dataclass(frozen=True)
class WeightedSamples:
    """A function given by values on cells of known measure."""
    values: np.ndarray
    weights: np.ndarray

    def measure_above(self, alpha: float) -> float:
        return float(np.sum(np.asarray(self.weights)[np.abs(self.values) > alpha]))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def alpha_grid(peak: float) -> np.ndarray:
    return np.geomspace(ALPHA_SPAN * peak, peak, ALPHA_POINTS) * ALPHA_SHRINK


def weak_ratio(g, norm1: float) -> float:
    """max over the alpha grid of alpha |{|g| > alpha}| / norm1 (a lower bound for the sup)."""
    if not norm1 > 0:
        raise ValueError("norm1 must be positive")
    if isinstance(g, tuple):
        g = WeightedSamples(*g)
    peak = g.max_abs()
    if peak == 0:
        return 0.0
    return max(a * g.measure_above(a) for a in alpha_grid(peak)) / norm1


def weak_quasinorm_exact(values, lengths) -> float:
    """sup_alpha alpha |{|F| > alpha}| for a piecewise-constant F, exactly.

    The sup is approached as alpha rises to each distinct value of |F|.
    """
    v = np.abs(np.asarray(values, dtype=float))
    L = np.asarray(lengths, dtype=float)
    order = np.argsort(-v)
    v, L = v[order], L[order]
    cum = np.cumsum(L)
    # ties: the measure just below value v counts every piece with |F| >= v
    last = np.r_[v[1:] != v[:-1], True]
    return float(np.max(v[last] * cum[last])) if v.size else 0.0


def random_step_function(rng, pieces: int = 12, span: float = 10.0):
    """Breakpoints and values of a random step function on [0, span]."""
    pts = np.sort(np.r_[0.0, rng.uniform(0, span, pieces - 1), span])
    vals = rng.standard_normal(pieces) * np.exp(rng.normal(0, 1, pieces))
    return pts, vals


def sum_steps(funcs):
    pts = np.unique(np.concatenate([p for p, _ in funcs]))
    mids = 0.5 * (pts[:-1] + pts[1:])
    total = np.zeros(mids.size)
    for p, v in funcs:
        idx = np.searchsorted(p, mids, side="right") - 1
        inside = (idx >= 0) & (idx < v.size)
        total[inside] += v[idx[inside]]
    return total, np.diff(pts)


def lemma_sum_check(rng, N: int) -> tuple[float, float]:
    """(||sum F_j||_{1,inf}, 4 (1 + log N) sum ||F_j||_{1,inf}) for N random step functions."""
    funcs = [random_step_function(rng) for _ in range(N)]
    lhs = weak_quasinorm_exact(*sum_steps(funcs))
    rhs = 4 * (1 + log(N)) * sum(weak_quasinorm_exact(v, np.diff(p)) for p, v in funcs)
    return lhs, rhs


# ---------------------------------------------------------------------------
# the discrete operator T_j

def _profile_cells(j: int, n: int, lam: float, dx, shape):
    """(r_j)_(lam) on a centred grid of the given shape; exact cell averages for n = 1."""
    axes = [(np.arange(c) - c // 2) * h for c, h in zip(shape, dx)]
    if n == 1:
        x = axes[0]
        h = dx[0]
        R = lambda t: -(1 + (t / lam) ** 2) ** -0.5  # antiderivative of (r_1)_(lam)
        return (R(x + h / 2) - R(x - h / 2)) / h
    if lam < 2 * max(dx):
        raise ValueError("profile scale below the grid resolution")
    X = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    return lam ** (-n) * r_profile(j, X / lam)


def discrete_T(j: int, f: SampledFunction, nodes: int = 8, explicit: int = 64,
               boundary_tol: float = 1e-12) -> FlowSum:
    """T_j f(., k) = sum_{h >= k+1} (int_0^1 f(., h+s) * (r_j)_(2^{h+s}) ds) / (h - k).

    The s-integral uses Gauss-Legendre, each x-convolution is a zero-padded
    FFT convolution against the rescaled profile, and the result is a
    FlowSum over the grid cells of the x-grid.
    """
    g = f.grid
    n = g.n
    if not 1 <= j <= n:
        raise ValueError("discrete_T needs 1 <= j <= n")
    vals = np.asarray(f.values, dtype=float)
    if _boundary_max(vals) > boundary_tol * max(np.max(np.abs(vals)), 1e-300):
        raise ValueError("support overflow: f does not vanish on the grid boundary")
    uax = g.u_axis()
    live = np.nonzero(np.any(vals != 0, axis=tuple(range(n))))[0]
    if live.size == 0:
        return FlowSum(0, np.zeros((1, int(np.prod(g.nx)))), np.ones(int(np.prod(g.nx))), explicit)
    h_lo = int(np.floor(uax[live[0]])) - 1
    h_hi = int(np.floor(uax[live[-1]])) + 1
    s, ws = np.polynomial.legendre.leggauss(nodes)
    s = 0.5 * (s + 1)
    ws = 0.5 * ws
    wx = np.ones(tuple(int(c) for c in g.nx))
    for axis, (h, c) in enumerate(zip(g.dx, g.nx)):
        wa = np.full(int(c), h)
        wa[0] = wa[-1] = 0.5 * h
        shp = [1] * n
        shp[axis] = int(c)
        wx = wx * wa.reshape(shp)
    kshape = tuple(2 * int(c) - 1 for c in g.nx)
    G = np.zeros((h_hi - h_lo + 1,) + tuple(int(c) for c in g.nx))
    for hi_, h in enumerate(range(h_lo, h_hi + 1)):
        for sj, wj in zip(s, ws):
            u = h + sj
            if u < uax[0] or u > uax[-1]:
                continue
            # linear interpolation of f in u
            t = (u - uax[0]) / g.du
            i0 = min(int(np.floor(t)), g.nu - 2)
            fr = t - i0
            sl = (1 - fr) * vals[..., i0] + fr * vals[..., i0 + 1]
            if not np.any(sl):
                continue
            ker = _profile_cells(j, n, 2.0 ** u, g.dx, kshape)
            conv = fftconvolve(sl * wx, ker, mode="same")
            G[hi_] += wj * conv
    return FlowSum(h_lo, G.reshape(G.shape[0], -1), wx.ravel(), explicit)


def u_bump_atom(grid: GridSpec, width: float, height: int, mass: float = 1.0) -> SampledFunction:
    """Narrow product bump in x (given width) times a u-bump inside [height, height + 1)."""
    from .riesz import bump
    x, u = grid.mesh()
    r = np.sqrt(np.sum(x * x, axis=-1)) / width
    vals = bump(r) * bump((u - height - 0.5) / 0.45)
    sf = SampledFunction(grid, vals)
    return SampledFunction(grid, vals * (mass / sf.l1()))
