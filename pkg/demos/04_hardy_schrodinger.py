"""Two endpoints: Hardy-space divergence and Riesz transforms of -d^2/ds^2 + xi^2 e^{2s}.

Run:  python3 demos/04_hardy_schrodinger.py
"""

import numpy as np

from axbriesz import riesz
from axbriesz import schrodinger as sch

print("mass of |a_v * K_1| on U_1 x [-U, -2] (n = 1)")
Us = [4, 8, 16, 32, 64]
M = [riesz.hardy_divergence(1, 1, U) for U in Us]
for U, m in zip(Us, M):
    print(f"  U = {U:3d}  M = {m:.6e}")
slope = np.polyfit(np.log(Us), M, 1)[0]
print(f"  increments per doubling are constant, slope in log U = {slope:.4e}")

g = sch.SchrodingerGrid(-14.0, 4.0, 720, xi=1.0)
Rd, Rp = sch.riesz_operators(sch.build_H(g))
f = np.exp(-(g.s + 1) ** 2) * np.cos(3 * g.s)
print(f"\nPythagoras residual {sch.pythagoras_residual(Rd, Rp, f):.2e}")
print(f"L2 norms: derivative {Rd.norm2():.12f}  potential {Rp.norm2():.12f}")
for p in (1.5, 4.0, 8.0):
    print(f"  p = {p}: probe ||R_d||_p >= {sch.lp_norm_probe(Rd, p):.4f}   ||R_p||_p >= {sch.lp_norm_probe(Rp, p):.4f}")
