"""Bessel functions and the bilinear Bochner-Riesz kernel.

Run with ``python demos/kernel_and_bessel.py``.
"""

import numpy as np

from biriesz.oracles import bessel_j_quadrature
from biriesz.specfun import KernelProfile, bessel_j, br_kernel, br_symbol_mass

# bessel_j switches between a power series, Miller recurrence and the Hankel
# expansion; the oracle integrates the Poisson representation in mpmath.
for nu in (0, 0.5, 2.5):
    for t in (0.1, 10.0, 120.0):
        fast = float(bessel_j(nu, t))
        slow = bessel_j_quadrature(nu, t)
        print(f"J_{nu}({t:>5}) = {fast:+.15f}   oracle diff {abs(fast - slow):.1e}")

# For n = 1 the symbol (1 - xi^2 - eta^2)^delta_+ lives on R^2, so the
# kernel is a 2-D radial profile. Its value at 0 is the symbol mass.
profile = KernelProfile(2, 1.0)
print("\nK(0) =", float(br_kernel(profile, 0.0)), " mass =", br_symbol_mass(2, 1.0))

# Away from the origin the envelope decays like r^-(1 + delta + 1/2).
r = np.linspace(5, 80, 20001)
for delta in (0.5, 1.0):
    k = np.abs(br_kernel(KernelProfile(2, delta), r))
    # local maxima trace the envelope
    peaks = np.flatnonzero((k[1:-1] > k[:-2]) & (k[1:-1] > k[2:])) + 1
    slope = np.polyfit(np.log(r[peaks]), np.log(k[peaks]), 1)[0]
    print(f"delta={delta}: fitted envelope slope {slope:.4f}, expected {-(1.5 + delta):.4f}")
