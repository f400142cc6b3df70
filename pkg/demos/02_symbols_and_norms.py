"""Operator-valued symbols and the weighted-norm uniformity experiment.

The ξ-sweep is exact along dyadic rescalings on the aligned grid, so all of
the spread seen below comes from the weights.

Run:  python3 demos/02_symbols_and_norms.py
"""

import numpy as np
from scipy.special import k0, k1

from axbriesz import multiplier as mp
from axbriesz import reports
from axbriesz.riesz import KernelId

xi = np.array([0.25, 1.0, 4.0])
print("S_{0,0}(xi) vs 2 xi K1(xi):", mp.symbol_S(1, (0,), 0, xi).real, 2 * xi * k1(xi))
print("S_{0,1}(xi) vs -2i xi K0  :", mp.symbol_S(1, (0,), 1, xi).imag, -2 * xi * k0(xi))

grid = reports.aligned_grid(800)
kid = KernelId(1, 1, "Kj")
v = np.log(2.0)
print("\ncovariance residual for xi -> 2 xi:", mp.scaling_covariance_check(kid, 1.0, v, grid))

print("\nnorm of M_K1(xi) on L^2(w), alpha = 1")
for desc, label in (("constant", "1"), (("power", 0.5), "|u|^1/2"), (("power", -0.5), "|u|^-1/2")):
    w = mp.MuckenhouptWeight(grid, desc)
    row = [mp.weighted_opnorm(mp.build_multiplier_operator(kid, x, (1,), grid), w)
           for x in 2.0 ** np.arange(-3, 4)]
    print(f"  w = {label:9s} A2 ~ {w.a2_estimate:5.2f}  norms " + " ".join(f"{r:6.3f}" for r in row)
          + f"   max/min {max(row) / min(row):.2f}")
print("""
For w = |u|^-1/2 a dyadic rescaling of xi moves the operator by log 2 in u
while the weight stays put, and the norm drifts by slightly more than a factor
of two across the sweep.  The unweighted row is flat, as covariance predicts.""")
