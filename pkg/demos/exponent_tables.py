"""Exact exponent geometry: Delta(n), alpha, regions and verdicts.

Run with ``python demos/exponent_tables.py``.
"""

from fractions import Fraction as F

from biriesz.indices import (
    ExponentTriple,
    a_n,
    alpha,
    b_n,
    best_thresholds,
    critical_delta,
    region_classify,
)

for n in (2, 3, 4):
    print(f"n={n}: a_n = {a_n(n)}, b_n = {b_n(n)}")

print("alpha(2; 5/4, 5/4) =", alpha(2, F(5, 4), F(5, 4)))
print("alpha(2; 1, 1)     =", alpha(2, 1, 1))

for text in ("2,2,1", "1,inf,1", "4,4,2", "2,inf,2", "3/2,3/2,3/4"):
    triple = ExponentTriple.parse(text)
    bounded, unbounded = best_thresholds(critical_delta(2, triple))
    region = region_classify(2, triple.p1, triple.p2)
    print(
        f"({text}) region {region:>6}: bounded if {bounded.describe()} [{bounded.source}]"
        + (f", unbounded if {unbounded.describe()} [{unbounded.source}]" if unbounded else "")
    )
