"""Acceptance criteria: one line per criterion, PASS or FAIL, with key metrics.

Each test runs the same suite the CLI exposes and asserts its verdict.  A
failing criterion stays failing here; see README for the analysis.
"""

import json

import numpy as np
import pytest

from axbriesz import reports

LINES = {}


def _short(metrics, keys=None, width=240):
    m = {k: metrics[k] for k in keys} if keys else metrics
    text = json.dumps(reports._plain(m), sort_keys=True, default=str)
    return text if len(text) <= width else text[:width - 3] + "..."


def _record(number, title, passed, detail):
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {title}  {detail}"
    LINES[number] = line
    print(line)
    assert passed, line


def test_criterion_01_asymptotic_constants():
    r = reports.profiles()
    worst = max(row["rel_err"] / row["bound"] for row in r.rows)
    _record(1, "Phi_n^(k) leading constants", r.passed, f"rows={len(r.rows)} worst err/bound={worst:.3g}")


def test_criterion_02_subordination():
    r = reports.subordination()
    _record(2, "closed form vs subordination", r.passed and r.metrics["pairs"] == 12, _short(r.metrics))


def test_criterion_03_heat_kernel():
    r = reports.heat()
    _record(3, "heat mass and semigroup", r.passed, _short(r.metrics))


def test_criterion_04_kernel_identity():
    r = reports.kernel_identity()
    _record(4, "kernel formula vs X_j derivative", r.passed, _short(r.metrics))


def test_criterion_05_local_match():
    r = reports.local_match()
    _record(5, "local remainder exponent", r.passed, _short(r.metrics))


def test_criterion_06_infinity_decomposition():
    r = reports.infinity_remainders()
    _record(6, "remainders at infinity are Cauchy", r.passed, _short(r.metrics))


def test_criterion_07_symbols():
    r = reports.symbols()
    _record(7, "symbol zero and decay", r.passed, _short(r.metrics))


def test_criterion_08_weighted_norm_uniformity():
    r = reports.opnorms(("K0", "Kj"), nu=800, xi_sweep=True)
    _record(8, "weighted norms within factor-2 band", r.passed, _short(r.metrics, width=400))


def test_criterion_09_model_kernels():
    r = reports.models()
    _record(9, "W and Z_eps refinement and Schur", r.passed, _short(r.metrics))


def test_criterion_10_representation():
    r = reports.representation(trials=10)
    _record(10, "two routes to sigma^xi(K) phi", r.passed, _short(r.metrics))


def test_criterion_11_haar_suite():
    r = reports.haar(trials=100)
    _record(11, "Haar coefficients, envelope, key estimate, sum lemma", r.passed, _short(r.metrics))


def test_criterion_12_weak_type():
    r = reports.weak11(1, 1, seed=0, trials=10)
    _record(12, "weak (1,1) ratio for T_1", r.passed, _short(r.metrics))


def test_criterion_13_hardy_divergence():
    parts = [reports.hardy(n, j, 64) for n, j in ((1, 1), (1, 0), (2, 1))]
    ok = all(p.passed for p in parts)
    detail = "; ".join(f"n={p.metrics['n']} j={p.metrics['j']} slope={p.metrics['slope']:.4g} "
                       f"R2={p.metrics['r2']:.6f}" for p in parts)
    _record(13, "M(U) grows like log U", ok, detail)


def test_criterion_14_schrodinger():
    r = reports.schrodinger()
    m = r.metrics
    drift = max(m["probe_drift"].values())
    _record(14, "Schroedinger Riesz transforms", r.passed,
            f"pythagoras={m['pythagoras_residual']:.3g} max_l2={m['max_l2_norm']:.15g} max drift={drift:.3g}")
