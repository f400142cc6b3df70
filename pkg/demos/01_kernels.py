"""Walk from the group law to the Riesz kernel and its two main terms.

Run:  python3 demos/01_kernels.py
"""

import numpy as np

from axbriesz import riesz, special
from axbriesz.group import GroupPoint, distance, invert, multiply
from axbriesz.riesz import KernelId

# The group law twists the x-part by e^u.
p = GroupPoint([1.0], np.log(2.0))
q = GroupPoint([1.0], 0.0)
print("p.q       =", multiply(p, q))
print("p^-1      =", invert(p))
print("d((3,0))  =", distance(GroupPoint([3.0], 0.0)), "(arccosh 5.5 =", np.arccosh(5.5), ")")

# Phi_n carries every radial kernel.  Its constants at infinity show up slowly,
# at rate 1/log X, while near X = 1 they settle polynomially.
print("\nPhi_3 against its leading terms")
for L in (10, 20, 30):
    X = np.exp(L)
    r = special.phi(3, 0, X) / special.asymptotic_leading(3, 0, X, "infinity")
    print(f"  X = e^{L:<3d} ratio {r:.6f}   3/log X = {3 / L:.3f}")
for xm1 in (1e-2, 1e-4):
    r = special.phi(3, 0, xm1=xm1) / special.asymptotic_leading(3, 0, 1 + xm1, "local")
    print(f"  X - 1 = {xm1:g}  ratio {r:.8f}")

# Near the identity R_1 looks like a Euclidean Riesz kernel on R^{n+1}.
n, j = 2, 1
kid = KernelId(n, j, "R")
c = riesz.local_constant(n)
print("\nk_R1 + c K_1^0 shrinks one order faster than either term (n = 2)")
for m in (4, 8, 12):
    r = 2.0 ** -m
    pt = GroupPoint([0.6 * r, 0.0], 0.8 * r)
    k = riesz.riesz_kernel(kid, pt)
    main = riesz.local_main_term(n, j, pt)
    print(f"  R = 2^-{m:<2d} kernel {k: .4e}  remainder {k + c * main: .4e}")

# Far away only the profile r_j survives, divided by u.
print("\nk_{R1*} against -2c K_1 at u = -6 along x = 0.5")
pt = GroupPoint([0.5, 0.0], -6.0)
far = riesz.infinity_main_term(KernelId(n, j, "Kj"), pt)
print(f"  kernel {riesz.riesz_kernel(KernelId(n, j, 'Rstar'), pt): .6e}   main term {-2 * c * far: .6e}")
