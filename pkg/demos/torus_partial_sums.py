"""Bochner-Riesz partial sums of a product of two Fourier series.

Run with ``python demos/torus_partial_sums.py``.
"""

import numpy as np

from biriesz.fieldgrid import GridSpec
from biriesz.operators import torus_partial_sum

spec = GridSpec(1, 512, 1.0)
x = spec.axis()

# One mode in each slot: a single weighted term survives.
m0 = 3
for delta in (0, 1, 4):
    out = torus_partial_sum(delta, 10.0, {m0: 1.0}, {m0: 1.0}, spec)
    print(f"delta={delta}: weight {abs(out.samples[0]):.6f}, expected {(1 - 2 * m0**2 / 100) ** delta:.6f}")

# Coefficients 1/(1+m^2) in both slots, truncated at |m| <= R. The full
# series sums to pi cosh(pi(1 - 2|x|)) / sinh(pi) on [-1/2, 1/2), so the
# product has a closed form; the sup error roughly halves per doubling of R.
target = (np.pi * np.cosh(np.pi * (1 - 2 * np.abs(x))) / np.sinh(np.pi)) ** 2
prev = None
for R in (8, 16, 32, 64, 128):
    coef = {m: 1.0 / (1 + m * m) for m in range(-R, R + 1)}
    err = np.abs(torus_partial_sum(1.0, R, coef, coef, spec).samples - target).max()
    print(f"R={R:>3}: sup error {err:.4e}" + (f"  (ratio {prev / err:.2f})" if prev else ""))
    prev = err
