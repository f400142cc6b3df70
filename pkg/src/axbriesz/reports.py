"""Verification suites shared by the command line and the acceptance tests.

Each suite returns a ``SuiteResult``: a pass flag, a flat dict of metrics and
table rows ready for CSV.  Nothing here reads the clock, so a fixed
configuration always produces the same output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log, pi

import numpy as np

from . import group as gg
from . import haar as hr
from . import multiplier as mp
from . import riesz as rz
from . import schrodinger as sc
from . import special as sp
from .group import GridSpec, SampledFunction


@dataclass
class SuiteResult:
    command: str
    passed: bool
    metrics: dict
    rows: list = field(default_factory=list)
    columns: tuple = ()

    def summary(self, config: dict) -> dict:
        return {"command": self.command, "config": config, "pass": bool(self.passed),
                "metrics": _plain(self.metrics)}


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    return v


def _fit(x, y):
    """Least-squares slope, intercept and R^2."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    slope, icpt = np.polyfit(x, y, 1)
    res = y - (slope * x + icpt)
    tot = y - y.mean()
    r2 = 1.0 - float(res @ res) / float(tot @ tot) if tot @ tot > 0 else 1.0
    return float(slope), float(icpt), r2


# ---------------------------------------------------------------------------
# special functions

def profiles(ns=(1, 2, 3, 4), ks=(0, 1, 2), tol: float | None = None) -> SuiteResult:
    """Ratios of Phi_n^{(k)} to its leading terms at both ends.

    Default bounds: 3/log X at X = e^{10,20,30}; 5 (X-1)^delta at X - 1 = 1e-2..1e-4.
    ``tol`` replaces both with one absolute bound.
    """
    rows = []
    for n in ns:
        sp.check_dim(n)
        for k in ks:
            for L in (10.0, 20.0, 30.0):
                X = float(np.exp(L))
                v = float(sp.phi(n, k, X))
                lead = sp.asymptotic_leading(n, k, X, "infinity")
                err = abs(v / lead - 1)
                bound = 3.0 / L if tol is None else tol
                rows.append(_profile_row(n, k, "infinity", X, v, err, bound))
            for t in (1e-2, 1e-3, 1e-4):
                v = float(sp.phi(n, k, xm1=t))
                lead = sp.asymptotic_leading(n, k, 1 + t, "local")
                err = abs(v / lead - 1)
                bound = 5 * t ** sp.local_exponent(n, k) if tol is None else tol
                rows.append(_profile_row(n, k, "local", 1 + t, v, err, bound))
    fails = sum(not r["ok"] for r in rows)
    return SuiteResult("profiles", fails == 0,
                       {"rows": len(rows), "failures": fails,
                        "worst_margin": max(r["rel_err"] / r["bound"] for r in rows)},
                       rows, ("n", "k", "X", "value", "leading_infinity", "leading_local", "ratio_infinity",
                              "ratio_local", "regime", "rel_err", "bound", "ok"))


def _profile_row(n, k, regime, X, v, err, bound):
    li = sp.asymptotic_leading(n, k, X, "infinity")
    ll = sp.asymptotic_leading(n, k, X, "local")
    return dict(n=n, k=k, X=X, value=v, leading_infinity=li, leading_local=ll,
                ratio_infinity=v / li, ratio_local=v / ll, regime=regime,
                rel_err=err, bound=bound, ok=err <= bound)


def subordination(ns=(1, 2, 3), Rs=(0.5, 1.0, 2.0, 5.0), tol: float = 1e-6) -> SuiteResult:
    rows = []
    for n in ns:
        for R in Rs:
            a = sp.sqrt_inv_kernel(n, R)
            b = sp.sqrt_inv_kernel(n, R, "subordination")
            e = abs(b - a) / abs(a)
            rows.append(dict(n=n, R=R, closed_form=a, subordination=b, rel_err=e, ok=e <= tol))
    worst = max(r["rel_err"] for r in rows)
    return SuiteResult("subordination", worst <= tol, {"pairs": len(rows), "worst_rel_err": worst},
                       rows, ("n", "R", "closed_form", "subordination", "rel_err", "ok"))


def heat(points: int = 20, seed: int = 0, mass_tol: float = 1e-4, semigroup_tol: float = 1e-3) -> SuiteResult:
    rows = []
    masses = {}
    for t in (0.25, 1.0):
        P = gg.RadialProfile(lambda R, t=t: sp.heat_kernel(1, t, R), 30.0, 0.01)
        masses[t] = float(gg.radial_mass(P, 1))
        rows.append(dict(check="mass", t=t, x=np.nan, u=np.nan, value=masses[t], reference=1.0,
                         rel_err=abs(masses[t] - 1)))
    half = gg.RadialProfile(lambda R: sp.heat_kernel(1, 0.5, R), 30.0, 0.005)
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < points:
        x, u = rng.uniform(-8, 8), rng.uniform(-3, 3)
        if gg.distance_xu(np.array([x]), u) <= 3:
            pts.append((x, u))
    pts = np.array(pts)
    conv = gg.convolve_radial(half, half, pts[:, 0], pts[:, 1])
    R = gg.distance_xu(pts[:, :1], pts[:, 1])
    ref = np.exp(-pts[:, 1] / 2) * np.array([sp.heat_kernel(1, 1.0, r) for r in R])
    rel = np.abs(conv / ref - 1)
    for (x, u), c, r, e in zip(pts, conv, ref, rel):
        rows.append(dict(check="semigroup", t=1.0, x=x, u=u, value=c, reference=r, rel_err=e))
    mass_err = max(abs(m - 1) for m in masses.values())
    ok = mass_err <= mass_tol and float(rel.max()) <= semigroup_tol
    return SuiteResult("heat", ok, {"mass_err": mass_err, "semigroup_max_rel": float(rel.max())},
                       rows, ("check", "t", "x", "u", "value", "reference", "rel_err"))


# ---------------------------------------------------------------------------
# Riesz kernels

def _sqrt_inv_xu(n, x, u):
    t = gg.cosh_distance_m1(x, u)
    return np.exp(-n * u / 2) * sp.phi(n, 0, xm1=t) / (pi * (2 * pi) ** (n / 2))


def kernel_identity(ns=(1, 2, 3), points: int = 100, seed: int = 0, tol: float = 1e-3,
                    h: float = 1e-5) -> SuiteResult:
    """Closed-form k_{R_j} against a central difference of X_j k_{L^{-1/2}}; R* against the involution of R."""
    rng = np.random.default_rng(seed)
    rows = []
    worst_fd = worst_adj = 0.0
    for n in ns:
        for _ in range(points):
            x, u = rng.uniform(-2, 2, n), rng.uniform(-2, 2)
            for j in range(n + 1):
                k = float(rz.kernel_xu(rz.KernelId(n, j, "R"), x, u))
                if j >= 1:
                    e = np.zeros(n)
                    e[j - 1] = h * np.exp(u)
                    fd = (_sqrt_inv_xu(n, x + e, u) - _sqrt_inv_xu(n, x - e, u)) / (2 * h)
                else:
                    fd = (_sqrt_inv_xu(n, x, u + h) - _sqrt_inv_xu(n, x, u - h)) / (2 * h)
                ks = float(rz.kernel_xu(rz.KernelId(n, j, "Rstar"), x, u))
                inv = float(np.exp(-n * u) * rz.kernel_xu(rz.KernelId(n, j, "R"), -np.exp(-u) * x, -u))
                efd = abs(fd / k - 1)
                eadj = abs(ks - inv) / max(abs(inv), 1e-300)
                worst_fd, worst_adj = max(worst_fd, efd), max(worst_adj, eadj)
                rows.append(dict(n=n, j=j, u=u, x_norm=float(np.linalg.norm(x)), kernel=k,
                                 finite_difference=float(fd), rel_err=efd, adjoint_err=eadj))
    return SuiteResult("kernels_identity", worst_fd <= tol and worst_adj <= 1e-10,
                       {"worst_fd_rel": worst_fd, "worst_adjoint_rel": worst_adj}, rows,
                       ("n", "j", "u", "x_norm", "kernel", "finite_difference", "rel_err", "adjoint_err"))


def local_match(ns=(1, 2, 3), seed: int = 0, margin: float = 0.1) -> SuiteResult:
    """Log-log slope of |k_{R_j} + c K_j^0| on R = 2^{-4}..2^{-12} along a random ray."""
    rng = np.random.default_rng(seed)
    Rs = 2.0 ** -np.arange(4, 13)
    rows, slopes = [], {}
    for n in ns:
        for j in range(n + 1):
            d = rng.normal(size=n + 1)
            d /= np.linalg.norm(d)
            vals = []
            for R in Rs:
                x, u = R * d[:n], R * d[n]
                k = rz.kernel_xu(rz.KernelId(n, j, "R"), x, u)
                vals.append(abs(float(k + rz.local_constant(n) * rz.local_main_term_xu(n, j, x, u))))
            s = _fit(np.log(Rs), np.log(vals))[0]
            slopes[f"n{n}_j{j}"] = s
            rows.append(dict(n=n, j=j, slope=s, threshold=-n - margin, ok=s >= -n - margin))
    return SuiteResult("kernels_local", all(r["ok"] for r in rows), {"slopes": slopes}, rows,
                       ("n", "j", "slope", "threshold", "ok"))


def infinity_remainders(pairs=((1, 0), (1, 1), (2, 0), (2, 1)), Us=(4, 8, 16, 32),
                        min_ratio: float = 1.5) -> SuiteResult:
    rows, ratios = [], {}
    ok = True
    for n, j in pairs:
        I = np.array([rz.remainder_integrability_check(n, j, U) for U in Us])
        bare = np.array([rz.remainder_integrability_check(n, j, U, main_scale=0.0) for U in Us])
        inc = np.diff(I)
        r = (inc[:-1] / inc[1:]).tolist()
        ratios[f"n{n}_j{j}"] = r
        ok &= all(x >= min_ratio for x in r)
        for U, a, b in zip(Us, I, bare):
            rows.append(dict(n=n, j=j, U=U, remainder_integral=a, bare_integral=b))
    return SuiteResult("kernels_infinity", ok, {"increment_ratios": ratios}, rows,
                       ("n", "j", "U", "remainder_integral", "bare_integral"))


def kernels(n=None, seed: int = 0) -> SuiteResult:
    ns = (1, 2, 3) if n is None else (n,)
    parts = [kernel_identity(ns, seed=seed), local_match(ns, seed=seed)]
    pairs = tuple((m, j) for m in ns if m <= 2 for j in (0, 1))
    if pairs:
        parts.append(infinity_remainders(pairs))
    rows = []
    for p in parts:
        for r in p.rows:
            rows.append(dict(suite=p.command, **{k: r.get(k, "") for k in ("n", "j")},
                             value=r.get("rel_err", r.get("slope", r.get("remainder_integral")))))
    return SuiteResult("kernels", all(p.passed for p in parts),
                       {p.command: {**p.metrics, "pass": p.passed} for p in parts}, rows,
                       ("suite", "n", "j", "value"))


def hardy(n: int = 1, j: int = 1, Umax: float = 64, min_r2: float = 0.99) -> SuiteResult:
    Us = [2.0 ** k for k in range(2, int(round(log(Umax, 2))) + 1)]
    if len(Us) < 3:
        raise ValueError("Umax must be at least 16")
    M = [rz.hardy_divergence(n, j, U) for U in Us]
    slope, icpt, r2 = _fit(np.log(Us), M)
    rows = [dict(n=n, j=j, U=U, mass=m, log_U=log(U)) for U, m in zip(Us, M)]
    return SuiteResult("hardy", slope > 0 and r2 >= min_r2,
                       {"n": n, "j": j, "slope": slope, "intercept": icpt, "r2": r2}, rows,
                       ("n", "j", "U", "mass", "log_U"))


# ---------------------------------------------------------------------------
# symbols and multiplier operators

def symbols(ns=(1, 2), min_eps: float = 0.3, zero_tol: float = 1e-8) -> SuiteResult:
    rows = []
    ok = True
    for n in ns:
        for alpha in np.ndindex(*(2,) * n):
            for j in range(1, n + 1):
                v = abs(complex(mp.symbol_S(n, alpha, j, np.zeros(n) if n > 1 else 0.0)))
                ok &= v <= zero_tol
                rows.append(dict(check="S(0)", n=n, j=j, alpha="".join(map(str, alpha)), value=v))
    for alpha in ((0,), (1,)):
        for j in (0, 1):
            d = mp.fitted_decay_exponent(1, alpha, j)
            ok &= d["eps"] >= min_eps
            rows.append(dict(check="eps", n=1, j=j, alpha=str(alpha[0]), value=d["eps"]))
    eps = {f"j{r['j']}_a{r['alpha']}": r["value"] for r in rows if r["check"] == "eps"}
    return SuiteResult("symbols", bool(ok),
                       {"max_abs_S0": max(r["value"] for r in rows if r["check"] == "S(0)"),
                        "eps": eps}, rows, ("check", "n", "j", "alpha", "value"))


XI_EXPONENTS = tuple(range(-3, 4))
ALIGNED_DU = log(2.0) / 14


def aligned_grid(nu: int = 800) -> mp.UGrid:
    """Cells of width log(2)/14, so rescaling xi by 2^k is a shift by 14k cells."""
    half = nu // 2
    return mp.UGrid(-half * ALIGNED_DU, half * ALIGNED_DU, 2 * half)


WEIGHTS = {"1": "constant", "|u|^1/2": ("power", 0.5), "|u|^-1/2": ("power", -0.5)}


def opnorms(variants=("K0", "Kj"), nu: int = 800, xi_sweep: bool = True, xi: float = 1.0,
            band: float = 2.0) -> SuiteResult:
    g = aligned_grid(nu)
    ws = {name: mp.MuckenhouptWeight(g, d) for name, d in WEIGHTS.items()}
    a2 = {name: mp.a2_characteristic(w) for name, w in ws.items()}
    xis = [s * 2.0 ** k for k in XI_EXPONENTS for s in (1, -1)] if xi_sweep else [xi]
    rows, groups = [], {}
    for var in variants:
        j = 0 if var == "K0" else 1
        kid = rz.KernelId(1, j, var)
        for alpha in ((0,), (1,)):
            for wname, w in ws.items():
                norms = []
                for x in xis:
                    op = mp.build_multiplier_operator(kid, [x], alpha, g)
                    val = mp.weighted_opnorm(op, w)
                    norms.append(val)
                    rows.append(dict(variant=var, n=1, j=j, alpha=alpha[0], xi=x, weight=wname,
                                     a2=a2[wname], norm=val, grid_nu=g.nu, grid_extent=g.u_max - g.u_min))
                key = f"{var}_a{alpha[0]}_w{wname}"
                groups[key] = max(norms) / min(norms)
    cov = max(mp.scaling_covariance_check(rz.KernelId(1, 1, "Kj"), [1.0], log(2.0), g),
              mp.scaling_covariance_check(rz.KernelId(1, 0, "K0"), [0.5], 2 * log(2.0), g))
    all_norms = [r["norm"] for r in rows]
    failing = sorted(k for k, v in groups.items() if v > band)
    ok = not failing and cov <= 1e-10
    return SuiteResult("opnorms", ok,
                       {"group_ratios": groups, "failing_groups": failing,
                        "global_ratio": max(all_norms) / min(all_norms),
                        "covariance_residual": cov, "grid": {"du": g.du, "nu": g.nu}},
                       rows, ("variant", "n", "j", "alpha", "xi", "weight", "a2", "norm", "grid_nu", "grid_extent"))


def models(L: float = 40.0, nus=(800, 1600), eps: float = 0.5, tol: float = 0.05) -> SuiteResult:
    rows = []
    W, Z = [], []
    for nu in nus:
        g = mp.UGrid(-L, L, nu)
        w1 = mp.MuckenhouptWeight(g)
        wv = mp.model_kernel_opnorm("W", None, w1)
        sw = mp.schur_bound_W(g)
        zv = mp.model_kernel_opnorm("Zeps", eps, w1)
        sz = mp.schur_bound(mp.model_kernel("Zeps", g, eps))
        W.append((wv, sw))
        Z.append((zv, sz))
        rows.append(dict(kernel="W", nu=nu, norm=wv, schur=sw))
        rows.append(dict(kernel="Zeps", nu=nu, norm=zv, schur=sz))
    dW = abs(W[-1][0] / W[-2][0] - 1)
    dZ = abs(Z[-1][0] / Z[-2][0] - 1)
    below = all(v <= s for v, s in W + Z) and all(v <= mp.w_continuum_norm() for v, _ in W)
    # duality of the two Z kernels on a power weight
    g = mp.UGrid(-20, 20, 800)
    w = mp.MuckenhouptWeight(g, ("power", 0.5))
    dual = abs(mp.model_kernel_opnorm("Zeps", eps, w) - mp.model_kernel_opnorm("ZepsStar", eps, w.inverse()))
    return SuiteResult("models", dW <= tol and dZ <= tol and below,
                       {"W_refine": dW, "Z_refine": dZ, "below_schur": below,
                        "W_continuum": mp.w_continuum_norm(), "Z_duality_gap": dual},
                       rows, ("kernel", "nu", "norm", "schur"))


def representation(trials: int = 10, seed: int = 1, tol: float = 1e-6) -> SuiteResult:
    rng = np.random.default_rng(seed)
    grid = GridSpec((-8.0,), (8.0,), (321,), -8.0, 8.0, 321)
    pg = mp.UGrid(-12, 8, 400)
    s = pg.nodes
    rows = []
    for t in range(trials):
        c = rng.uniform(-2, 2, (3, 2))
        wd = rng.uniform(0.5, 0.8, (3, 2))
        a = rng.normal(size=3)

        def f(x, u, c=c, wd=wd, a=a):
            return sum(a[i] * np.exp(-((x[..., 0] - c[i, 0]) / wd[i, 0]) ** 2 / 2
                                     - ((u - c[i, 1]) / wd[i, 1]) ** 2 / 2) for i in range(3))

        K = SampledFunction.from_callable(grid, f)
        phi = np.exp(-(s + 1) ** 2 / 0.98) * np.cos(rng.uniform(0, 3) * s)
        xi = np.array([rng.choice([-1, 1]) * rng.uniform(0.5, 2)])
        r1 = mp.representation_apply(K, xi, pg, phi, "direct")
        r2 = mp.representation_apply(K, xi, pg, phi, "fourier")
        e = float(np.linalg.norm(r1 - r2) / np.linalg.norm(r1))
        rows.append(dict(trial=t, xi=float(xi[0]), rel_l2=e))
    worst = max(r["rel_l2"] for r in rows)
    return SuiteResult("representation", worst <= tol, {"worst_rel_l2": worst}, rows,
                       ("trial", "xi", "rel_l2"))


# ---------------------------------------------------------------------------
# Haar model

RHO_TEST = {
    "gauss_derivative": lambda t: -2 * t * np.exp(-t * t),
    "cauchy_derivative": lambda t: -2 * t / (1 + t * t) ** 2,
}
RHO_HELD_OUT = {
    "gauss_shifted": lambda t: -1.6 * (t - 0.3) * np.exp(-(t - 0.3) ** 2),
    "cauchy_dilated": lambda t: -(2 * t + 1) / (1 + (2 * t + 1) ** 2) ** 2,
}


def _family_ratio(seed: int, beta: float = 1.0, full: bool = False):
    fam = hr.random_haar_family(np.random.default_rng(seed), beta=beta)
    l1 = sum(d.l1() for d in fam.values())
    r = hr.weak_ratio(hr.key_sum(fam, beta), l1)
    return (r, len(fam), l1) if full else r


def haar(seed: int = 0, trials: int = 100, fit_M: int = 6, check_M: int = 8,
         lemma_trials: int = 200, stability: float = 0.10) -> SuiteResult:
    rows = []
    fam = hr.DyadicFamily()
    # c_J(psi_J) = 1 for a few intervals
    unit = []
    for m, k in ((0, 0), (3, -2), (-2, -1)):
        a, b = fam.interval(m, k)
        coeffs = hr.haar_coefficients(lambda t, a=a, b=b: hr.psi(a, b, t), fam, 4, order=2)
        unit.append(coeffs[(m, k)])
    unit_err = max(abs(c - 1) for c in unit)
    exact = [hr.self_coefficient(*fam.interval(m, k)) for m in range(-6, 7) for k in (-3, 0, 5)]
    # envelope
    C = hr.fit_envelope_constant([hr.haar_coefficients(r, fam, fit_M) for r in RHO_TEST.values()], fam)
    famC = fam.with_C(C)
    violations = {}
    for name, rho in {**RHO_TEST, **RHO_HELD_OUT}.items():
        violations[name] = hr.envelope_violations(hr.haar_coefficients(rho, fam, check_M), famC)
        rows.append(dict(check="envelope", label=name, value=violations[name]))
    recon = [hr.reconstruction_error(RHO_TEST["gauss_derivative"], fam, M) for M in (3, 4, 5, 6)]
    Ms, sums, inc = hr.kappa_partial_sums(famC, 0.9, 1.0)
    for M, e in zip((3, 4, 5, 6), recon):
        rows.append(dict(check="reconstruction_l1", label=f"M={M}", value=e))
    # key-sum constant over two disjoint seed batches
    ss = np.random.SeedSequence(seed)
    seeds = [int(s.generate_state(1)[0]) for s in ss.spawn(2 * trials)]
    trial = [_family_ratio(s, full=True) for s in seeds]
    ratios = [t[0] for t in trial]
    c1, c2 = max(ratios[:trials]), max(ratios[trials:])
    for i, (s, (r, scales, l1)) in enumerate(zip(seeds, trial)):
        rows.append(dict(check="key_sum_ratio", label=f"batch{i // trials}", value=r, seed=s,
                         scales=scales, total_l1=l1, C_emp=max(ratios[:i + 1][(i // trials) * trials:])))
    beta = {b: max(_family_ratio(s, b) for s in seeds[:10]) for b in (0.5, 1.0, 2.0)}
    # the sum lemma
    rng = np.random.default_rng(seed)
    lemma = {}
    for N in (2, 4, 8):
        worst = max(a / b for a, b in (hr.lemma_sum_check(rng, N) for _ in range(lemma_trials)))
        lemma[N] = worst
        rows.append(dict(check="lemma_sum", label=f"N={N}", value=worst))
    stable = abs(c1 / c2 - 1) <= stability
    ok = (unit_err <= 1e-12 and all(c == 1.0 for c in exact) and sum(violations.values()) == 0 and stable
          and all(v <= 1 for v in lemma.values()) and inc[-1] <= 1e-8)
    return SuiteResult("haar", ok,
                       {"unit_coefficient_err": unit_err, "unit_coefficient_exact": all(c == 1.0 for c in exact), "C_eps": C, "envelope_violations": violations,
                        "reconstruction_l1": recon, "kappa_sum": float(sums[-1]),
                        "kappa_last_increment": float(inc[-1]),
                        "C_emp": max(c1, c2), "C_emp_batches": [c1, c2],
                        "C_emp_beta": {str(b): v for b, v in beta.items()},
                        "lemma_worst_ratio": {str(k): v for k, v in lemma.items()}},
                       rows, ("check", "label", "value", "seed", "scales", "total_l1", "C_emp"))


ATOM_GRID = GridSpec((-4096.0,), (4096.0,), (65537,), 4.0, 7.0, 61)
RANDOM_GRID = GridSpec((-1024.0,), (1024.0,), (8193,), 0.0, 9.0, 91)


def _random_input(rng, grid: GridSpec, atoms: int = 4) -> SampledFunction:
    x, u = grid.mesh()
    vals = np.zeros(grid.shape)
    for _ in range(atoms):
        c = rng.uniform(-64, 64)
        w = np.exp(rng.uniform(np.log(0.5), np.log(8.0)))
        h = int(rng.integers(1, 7))
        vals += rng.normal() * rz.bump((x[..., 0] - c) / w) * rz.bump((u - h - 0.5) / 0.45)
    return SampledFunction(grid, vals)


def weak11(n: int = 1, j: int = 1, seed: int = 0, trials: int = 100, tol: float = 0.15) -> SuiteResult:
    if n != 1 or j != 1:
        raise ValueError("weak11 runs the n = 1, j = 1 operator")
    rows = []
    ratios = {}
    for width in (1.0, 0.25):
        for mass in (1.0, 3.7):
            f = hr.u_bump_atom(ATOM_GRID, width, 5, mass)
            r = hr.weak_ratio(hr.discrete_T(j, f), f.l1())
            ratios[(width, mass)] = r
            rows.append(dict(input="atom", width=width, mass=mass, seed="", ratio=r))
    base = ratios[(1.0, 1.0)]
    spread = max(abs(v / base - 1) for v in ratios.values())
    ss = np.random.SeedSequence(seed)
    emp = []
    for child in ss.spawn(trials):
        s = int(child.generate_state(1)[0])
        f = _random_input(np.random.default_rng(s), RANDOM_GRID)
        r = hr.weak_ratio(hr.discrete_T(j, f), f.l1())
        emp.append(r)
        rows.append(dict(input="random", width="", mass=f.l1(), seed=s, ratio=r))
    return SuiteResult("weak11", spread <= tol,
                       {"atom_ratio": base, "atom_spread": spread, "C_emp": max(emp) if emp else None,
                        "random_median": float(np.median(emp)) if emp else None},
                       rows, ("input", "width", "mass", "seed", "ratio"))


# ---------------------------------------------------------------------------
# Schrodinger

def schrodinger(xi: float = 1.0, ps=(1.5, 2.0, 4.0, 8.0), ns: int = 720, extent=(-14.0, 4.0),
                trials: int = 100, seed: int = 0, tol: float = 0.10) -> SuiteResult:
    rows = []
    data = {}
    resid = 0.0
    norm_max = 0.0
    lo, hi = extent
    # level 1 halves the spacing on the same interval; level 2 doubles the interval
    for level, (a, b, m) in enumerate(((lo, hi, ns), (lo, hi, 2 * ns + 1), (2 * lo, 2 * hi, 2 * ns))):
        g = sc.SchrodingerGrid(a, b, m, xi)
        Rd, Rp = sc.riesz_operators(sc.build_H(g))
        f = np.random.default_rng(seed).standard_normal(m)
        resid = max(resid, sc.pythagoras_residual(Rd, Rp, f))
        norm_max = max(norm_max, Rd.norm2(), Rp.norm2())
        for name, op in (("deriv", Rd), ("pot", Rp)):
            for p in ps:
                v = sc.lp_norm_probe(op, p, trials, seed)
                data[(name, p, level)] = v
                rows.append(dict(xi=xi, p=p, ns=m, extent=b - a, operator=name, probe_norm=v, seed=seed))
    drift = {f"{name}_p{p}": max(abs(data[(name, p, lev)] / data[(name, p, 0)] - 1) for lev in (1, 2))
             for name in ("deriv", "pot") for p in ps}
    ok = resid <= 1e-10 and norm_max <= 1 + 1e-10 and max(drift.values()) <= tol
    return SuiteResult("schrodinger", ok,
                       {"pythagoras_residual": resid, "max_l2_norm": norm_max, "probe_drift": drift,
                        "probe_values": {f"{k[0]}_p{k[1]}_level{k[2]}": v for k, v in data.items()}},
                       rows, ("xi", "p", "ns", "extent", "operator", "probe_norm", "seed"))
