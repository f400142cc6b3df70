"""Haar coefficients, the flow-sum key estimate, and weak-type ratios.

Run:  python3 demos/03_haar_weak_type.py
"""

import numpy as np

from axbriesz import haar
from axbriesz.group import GridSpec

fam = haar.DyadicFamily(eps=0.5)
rho = lambda t: -2 * t * np.exp(-t * t)
print("L1 error of the truncated Haar series of -2t e^{-t^2}")
for M in (3, 4, 5, 6):
    print(f"  M = {M}: {haar.reconstruction_error(rho, fam, M):.5f}")

coeffs = haar.haar_coefficients(rho, fam, 6)
C = haar.fit_envelope_constant([coeffs], fam)
print(f"\nsmallest envelope constant C(eps) for this profile: {C:.3f}")

rng = np.random.default_rng(0)
ratios = []
for _ in range(20):
    deltas = haar.random_haar_family(rng)
    S = haar.key_sum(deltas)
    ratios.append(haar.weak_ratio(S, sum(d.l1() for d in deltas.values())))
print(f"key estimate: weak ratio over 20 random families  max {max(ratios):.3f}  median {np.median(ratios):.3f}")

lhs, rhs = haar.lemma_sum_check(rng, 30)
print(f"sum of 30 weak-L1 functions: {lhs:.3f} <= 4(1+log 30) sum = {rhs:.3f}")

grid = GridSpec((-1024.0,), (1024.0,), (8193,), 0.0, 9.0, 91)
print("\nweak ratio of T_1 on narrowing atoms at height 5")
for width in (8.0, 4.0, 2.0):
    f = haar.u_bump_atom(grid, width, 5)
    T = haar.discrete_T(1, f)
    print(f"  width {width:3.0f}: {haar.weak_ratio(T, f.l1()):.5f}")
