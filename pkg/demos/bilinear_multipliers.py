"""Applying bilinear multipliers on a periodic grid.

Run with ``python demos/bilinear_multipliers.py``.
"""

import numpy as np

from biriesz.analysis import a1_functional, a2_functional
from biriesz.fieldgrid import GridSpec, lp_norm, random_band_limited
from biriesz.operators import BilinearOp, bochner_riesz
from biriesz.symbols import br_profile, dyadic_spherical, lift_biradial

rng = np.random.default_rng(1)
spec = GridSpec(1, 64, 16.0)  # n = 1, N = 64 samples on [-8, 8)
f = random_band_limited(spec, rng)
g = random_band_limited(spec, rng)

# A biradial profile m0(|xi|, |eta|) becomes a symbol on the 2n-dim grid.
symbol = lift_biradial(br_profile(1.0, 1.0), spec)
fast = BilinearOp(symbol, "frequency_loop")(f, g)
slow = BilinearOp(symbol, "kernel_convolution")(f, g)
print("engine discrepancy:", np.linalg.norm(fast.samples - slow.samples) / np.linalg.norm(fast.samples))

# A1 and A2 bound the operator on L^p1 x L^p2 -> L^p and on L^2 x L^2 -> L^2.
A1, A2 = a1_functional(symbol), a2_functional(symbol)
print(f"A1 = {A1:.4f}, A2 = {A2:.4f}")
print("||T(f,g)||_1 / (||f||_2 ||g||_2) =", lp_norm(fast, 1) / (lp_norm(f, 2) * lp_norm(g, 2)))
print("||T(f,g)||_2 / (||f||_2 ||g||_2) =", lp_norm(fast, 2) / (lp_norm(f, 2) * lp_norm(g, 2)))

# A large radius makes the symbol nearly 1 on the joint spectrum.
for R in (2, 10, 100):
    out = bochner_riesz(1.0, R, f, g)
    err = np.linalg.norm((out - f * g).samples) / np.linalg.norm((f * g).samples)
    print(f"R={R:>3}: ||S_R(f,g) - fg|| / ||fg|| = {err:.2e}")

# Annular pieces near the sphere shrink in A2 as the annulus thins.
wide = GridSpec(2, 32, 16.0)
for j in range(1, 5):
    piece = lift_biradial(dyadic_spherical(1.0, j, weighted=True), wide, strict=False)
    print(f"j={j}: A2 = {a2_functional(piece):.4e}")
