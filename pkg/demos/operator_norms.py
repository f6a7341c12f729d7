"""Empirical operator norms and the (2,2,1) dichotomy.

Run with ``python demos/operator_norms.py`` (about half a minute).
"""

from biriesz.analysis import dyadic_rate_fit, opnorm_lower
from biriesz.fieldgrid import GridSpec, gaussian, lp_norm
from biriesz.indices import ExponentTriple
from biriesz.operators import bochner_riesz_op, halfspace_witness

triple = ExponentTriple(2, 2, 1)

# For delta > 0 the lower bounds settle as the grid refines.
for N in (64, 128):
    spec = GridSpec(1, N, N / 4)
    est = opnorm_lower(bochner_riesz_op(0.5, 1.0, spec), triple, budget=30, seeds=4)
    print(f"delta=0.5, N={N}: lower bound {est.value:.5f} after {len(est.trace)} ascent values")

# The half-space cut of a product is the delta = 0 obstruction. Its L^1 norm
# on a Gaussian bump keeps increasing, but only logarithmically.
prev = None
for N, L in ((32, 4.0), (64, 8.0), (128, 16.0)):
    spec = GridSpec(2, N, L)
    u = gaussian(spec, 1.0)
    norm = lp_norm(halfspace_witness((1.0, 0.0), "joint", u, u), 1) / lp_norm(u, 2) ** 2
    print(f"N={N}, L={L}: ||P(u u)||_1 / ||u||_2^2 = {norm:.4f}" + (f"  (x{norm / prev:.3f})" if prev else ""))
    prev = norm

# Dyadic annular pieces: fitted growth of the (2,2,1) lower bounds.
fit = dyadic_rate_fit(1.0, triple, range(1, 4), budget=10, seeds=1)
for j, value, log2v in fit.to_rows():
    print(f"j={j}: {value:.4e} (log2 {log2v:+.3f})")
print(f"rate {fit.rate:+.3f}, residual {fit.residual:.3f}")
