"""Exact exponent geometry for bilinear Bochner-Riesz means.

All arithmetic uses :class:`fractions.Fraction`. Exponents are handled
through their reciprocals, so ``p = inf`` is simply ``1/p = 0``.

The main entry point is :func:`critical_delta`, which collects every known
sufficient condition for boundedness and every known counterexample at a
triple ``(p1, p2, p)`` as a list of :class:`Verdict` records.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .errors import DomainError

INF = math.inf
ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def to_fraction(value) -> Fraction:
    """Parse an exact rational from int, Fraction, float, or string (``'4/3'``, ``'0.75'``)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError("non-finite value has no rational form")
        return Fraction(str(value))
    text = str(value).strip()
    return Fraction(text)


def reciprocal(p) -> Fraction:
    """``1/p`` as a Fraction, with ``1/inf = 0``."""
    if isinstance(p, str) and p.strip().lower() in ("inf", "infinity", "∞"):
        return ZERO
    if isinstance(p, float) and math.isinf(p):
        if p < 0:
            raise DomainError("exponent must be positive")
        return ZERO
    q = to_fraction(p)
    if q <= 0:
        raise DomainError("exponent must be positive")
    return 1 / q


def exponent_from_reciprocal(r: Fraction):
    """Inverse of :func:`reciprocal`; returns ``math.inf`` for ``r = 0``."""
    return INF if r == 0 else 1 / Fraction(r)


def format_exponent(r: Fraction) -> str:
    return "inf" if r == 0 else str(1 / Fraction(r))


@dataclass(frozen=True)
class ExponentTriple:
    """Exponents ``(p1, p2, p)`` stored as exact reciprocals.

    The Hölder relation ``1/p = 1/p1 + 1/p2`` is enforced unless the triple
    was built with :meth:`unchecked`, which the scaling experiments need.
    """

    inv_p1: Fraction
    inv_p2: Fraction
    inv_p: Fraction
    holder: bool = True

    def __init__(self, p1, p2, p=None, *, _check=True):
        a, b = reciprocal(p1), reciprocal(p2)
        c = a + b if p is None else reciprocal(p)
        if _check:
            if not (0 <= a <= 1 and 0 <= b <= 1):
                raise DomainError("p1 and p2 must lie in [1, inf]")
            if c != a + b:
                raise DomainError(f"Hölder relation fails: 1/p = {c} but 1/p1 + 1/p2 = {a + b}")
        object.__setattr__(self, "inv_p1", a)
        object.__setattr__(self, "inv_p2", b)
        object.__setattr__(self, "inv_p", c)
        object.__setattr__(self, "holder", c == a + b)

    @classmethod
    def unchecked(cls, p1, p2, p):
        """Triple without the Hölder relation (exponents must still be positive)."""
        return cls(p1, p2, p, _check=False)

    @classmethod
    def from_reciprocals(cls, x, y, z=None):
        x, y = Fraction(x), Fraction(y)
        z = x + y if z is None else Fraction(z)
        return cls(exponent_from_reciprocal(x), exponent_from_reciprocal(y), exponent_from_reciprocal(z), _check=z == x + y)

    @classmethod
    def parse(cls, text: str):
        """``'2,2,1'`` or ``'2,inf'`` (the third entry defaults by Hölder)."""
        parts = [s.strip() for s in str(text).split(",") if s.strip()]
        if len(parts) not in (2, 3):
            raise DomainError(f"cannot parse exponent triple {text!r}")
        return cls(*parts)

    @property
    def p1(self):
        return exponent_from_reciprocal(self.inv_p1)

    @property
    def p2(self):
        return exponent_from_reciprocal(self.inv_p2)

    @property
    def p(self):
        return exponent_from_reciprocal(self.inv_p)

    def floats(self):
        """``(p1, p2, p)`` as floats (``inf`` allowed)."""
        return tuple(INF if r == 0 else float(1 / r) for r in (self.inv_p1, self.inv_p2, self.inv_p))

    def swapped(self):
        return ExponentTriple.unchecked(self.p2, self.p1, self.p)

    def label(self):
        return ",".join(format_exponent(r) for r in (self.inv_p1, self.inv_p2, self.inv_p))

    def __str__(self):
        return f"({self.label()})"

    def to_json(self):
        return [format_exponent(r) for r in (self.inv_p1, self.inv_p2, self.inv_p)]


def a_n(n) -> Fraction:
    return Fraction(n + 1, 2 * n)


def b_n(n) -> Fraction:
    return Fraction(n + 1, 2 * n) + Fraction(n - 1, n * n + n)


# --- restriction-extension region ------------------------------------------------


def delta_region_reciprocal(n, x, y) -> bool:
    """Membership of ``(1/p, 1/q) = (x, y)`` in the region ``Delta(n)``."""
    if n < 2:
        raise DomainError("Delta(n) is defined for n >= 2")
    x, y = Fraction(x), Fraction(y)
    if not (0 <= x <= 1 and 0 <= y <= 1):
        raise DomainError("reciprocals must lie in [0, 1]")
    return (
        0 <= y <= x <= 1
        and x - y >= Fraction(2, n + 1)
        and x > Fraction(n + 1, 2 * n)
        and y < Fraction(n - 1, 2 * n)
    )


def delta_region(n, p, q) -> bool:
    """Whether ``R_1`` maps ``L^p`` to ``L^q`` boundedly, i.e. ``(1/p, 1/q)`` lies in ``Delta(n)``."""
    return delta_region_reciprocal(n, reciprocal(p), reciprocal(q))


# --- the alpha exponent --------------------------------------------------------


def alpha_reciprocal(n, x, y, eps=0) -> Fraction:
    """``alpha`` at reciprocals ``(x, y) = (1/p1, 1/p2)``, both in ``(a_n, 1]``.

    Case boundaries: ``(a_n, b_n)`` open, ``[b_n, 1]`` closed.
    """
    if n < 2:
        raise DomainError("alpha is defined for n >= 2")
    x, y, eps = Fraction(x), Fraction(y), to_fraction(eps)
    if eps < 0:
        raise DomainError("eps must be >= 0")
    a, b = a_n(n), b_n(n)
    if not (a < x <= 1 and a < y <= 1):
        raise DomainError(f"alpha needs 1/p1, 1/p2 in ({a}, 1]")
    low_x, low_y = x < b, y < b
    c = Fraction(2, n + 1) - Fraction(n - 1, 2 * n)
    if low_x and low_y:
        return Fraction(4, n + 1)
    if low_x:
        return c + y + eps
    if low_y:
        return c + x + eps
    return x + y - Fraction(n - 1, n) + eps


def alpha(n, p1, p2, eps=0) -> Fraction:
    """Piecewise exponent ``alpha(p1, p2, eps)`` for ``1 <= p1, p2 < 2n/(n+1)``."""
    return alpha_reciprocal(n, reciprocal(p1), reciprocal(p2), eps)


def alpha_limit(n, x, y) -> Fraction:
    """Continuous extension of ``alpha(., ., 0)`` to the closed square ``[a_n, 1]**2``."""
    x, y = Fraction(x), Fraction(y)
    a, b = a_n(n), b_n(n)
    if not (a <= x <= 1 and a <= y <= 1):
        raise DomainError(f"alpha extension needs reciprocals in [{a}, 1]")
    c = Fraction(2, n + 1) - Fraction(n - 1, 2 * n)
    if x < b and y < b:
        return Fraction(4, n + 1)
    if x < b:
        return c + y
    if y < b:
        return c + x
    return x + y - Fraction(n - 1, n)


def alpha_jumps(n, grid=48):
    """Jumps of ``alpha(., ., 0)`` across the ``b_n`` lines, sampled on a lattice.

    Returns a list of ``(x, y, left_value, right_value)``; empty when the
    piecewise formulas agree on the case boundaries.
    """
    b = b_n(n)
    a = a_n(n)
    c = Fraction(2, n + 1) - Fraction(n - 1, 2 * n)
    jumps = []
    for k in range(grid + 1):
        t = a + (1 - a) * Fraction(k, grid)
        if t == a:
            continue
        # crossing x = b at fixed y = t: left uses x < b formulas
        left = Fraction(4, n + 1) if t < b else c + t
        right = alpha_reciprocal(n, b, t)
        if left != right:
            jumps.append((b, t, left, right))
        left = Fraction(4, n + 1) if t < b else c + t
        right = alpha_reciprocal(n, t, b)
        if left != right:
            jumps.append((t, b, left, right))
    return jumps


# --- verdicts ------------------------------------------------------------------


BOUNDED = "bounded_if"
UNBOUNDED = "unbounded_if"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    """One statement about ``S^delta`` at a triple.

    ``bounded_if`` with ``strict=True`` reads "bounded whenever
    ``delta > threshold``" (``>=`` when not strict). ``unbounded_if`` with
    ``strict=False`` reads "unbounded whenever ``delta <= threshold``"
    (``<`` when strict).
    """

    status: str
    threshold: Fraction | None
    strict: bool
    source: str
    note: str = ""

    def holds_at(self, delta) -> bool:
        d = to_fraction(delta)
        if self.status == BOUNDED:
            return d > self.threshold if self.strict else d >= self.threshold
        if self.status == UNBOUNDED:
            return d < self.threshold if self.strict else d <= self.threshold
        return False

    def describe(self) -> str:
        if self.status == UNKNOWN:
            return "unknown"
        if self.status == BOUNDED:
            op = ">" if self.strict else ">="
        else:
            op = "<" if self.strict else "<="
        return f"delta{op}{self.threshold}"


def _bounded(threshold, source, note="", strict=True):
    return Verdict(BOUNDED, Fraction(threshold), strict, source, note)


def _unbounded(threshold, source, note="", strict=False):
    return Verdict(UNBOUNDED, Fraction(threshold), strict, source, note)


# --- interpolation envelope ---------------------------------------------------------


def interpolation_anchors(n):
    """Anchor points ``((1/p1, 1/p2), delta)`` of the interpolation recipe.

    The six triples of the proofs plus ``(inf, inf, inf)``, where the
    integrable-kernel bound ``delta > n - 1/2`` applies.
    """
    h = HALF
    return (
        ((h, h), ZERO),
        ((ONE, ZERO), Fraction(n, 2)),
        ((ZERO, ONE), Fraction(n, 2)),
        ((h, ZERO), Fraction(n - 1, 2)),
        ((ZERO, h), Fraction(n - 1, 2)),
        ((ONE, ONE), Fraction(2 * n - 1, 2)),
        ((ZERO, ZERO), Fraction(2 * n - 1, 2)),
    )


def _plane(pts, vals):
    """Affine function ``(A, B, C)`` with ``A x + B y + C`` through three lifted points."""
    (x1, y1), (x2, y2), (x3, y3) = pts
    v1, v2, v3 = vals
    det = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)
    A = ((v2 - v1) * (y3 - y1) - (v3 - v1) * (y2 - y1)) / det
    B = ((x2 - x1) * (v3 - v1) - (x3 - x1) * (v2 - v1)) / det
    return A, B, v1 - A * x1 - B * y1


def _edges(pts):
    """Half-planes ``a x + b y + c >= 0`` whose intersection is the triangle."""
    out = []
    for i in range(3):
        (xa, ya), (xb, yb), (xc, yc) = pts[i], pts[(i + 1) % 3], pts[(i + 2) % 3]
        a, b = yb - ya, xa - xb
        c = -(a * xa + b * ya)
        if a * xc + b * yc + c < 0:
            a, b, c = -a, -b, -c
        out.append((a, b, c))
    return tuple(out)


@lru_cache(maxsize=None)
def _lower_facets(n):
    """Lower convex hull of the lifted anchors as ``(edges, plane)`` pairs."""
    anchors = interpolation_anchors(n)
    facets = []
    for idx in combinations(range(len(anchors)), 3):
        pts = tuple(anchors[i][0] for i in idx)
        (x1, y1), (x2, y2), (x3, y3) = pts
        if (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1) == 0:
            continue
        A, B, C = _plane(pts, [anchors[i][1] for i in idx])
        if all(v >= A * x + B * y + C for (x, y), v in anchors):
            facets.append((_edges(pts), (A, B, C)))
    return tuple(facets)


def interpolated_delta(n, x, y) -> Fraction:
    """Lower convex envelope of the anchor values at ``(x, y)``.

    This is the smallest ``delta`` obtainable by convex combinations of the
    anchor triples; it requires ``0 <= x, y <= 1``.
    """
    x, y = Fraction(x), Fraction(y)
    if not (0 <= x <= 1 and 0 <= y <= 1):
        raise DomainError("interpolation needs 1/p1, 1/p2 in [0, 1]")
    for edges, (A, B, C) in _lower_facets(n):
        if all(a * x + b * y + c >= 0 for a, b, c in edges):
            return A * x + B * y + C
    raise DomainError("point outside the interpolation hull")  # anchors include the corners


# --- region classification ---------------------------------------------------------


REGIONS = ("I", "II", "III", "IV", "V", "shaded", "VI", "VII")


def region_classify_reciprocal(n, x, y) -> str:
    """Region tag of ``(1/p, 1/q) = (x, y)``; symmetric in the two slots."""
    x, y = Fraction(x), Fraction(y)
    if not (0 <= x <= 1 and 0 <= y <= 1):
        return "outside"
    hi, lo = max(x, y), min(x, y)
    s = hi + lo
    if hi <= HALF:
        return "I" if s >= HALF else "II"
    if s <= 1:
        return "III"
    if n < 2:
        return "outside"
    a, b = a_n(n), b_n(n)
    if lo >= b:
        return "IV"
    if a <= lo < b <= hi:
        return "V"
    if a <= lo and hi < b:
        return "shaded"
    if lo > HALF:
        return "VI"
    return "VII"


def region_classify(n, p, q) -> str:
    """Region tag I-VII (or ``'shaded'``/``'outside'``) of the pair ``(p, q)``."""
    return region_classify_reciprocal(n, reciprocal(p), reciprocal(q))


def delta_one(n, x, y) -> Fraction:
    """Non-Banach interpolation value ``n(1/p - 1/2) - (n-1)/(2 r')`` with ``1/p = max``."""
    hi = max(x, y)
    inv_r_prime = 1 - (x + y)
    return n * (hi - HALF) - Fraction(n - 1, 2) * inv_r_prime


def delta_two(n, x, y) -> Fraction | None:
    """``n alpha - 1`` when both reciprocals exceed ``a_n``; otherwise ``None``."""
    a = a_n(n)
    if x > a and y > a:
        return n * alpha_reciprocal(n, x, y) - 1
    return None


def crossover_prediction(n, x, y):
    """Printed rule for whether ``delta_2 <= delta_1`` in regions IV and V.

    Returns ``True``/``False``, or ``None`` outside those regions.
    """
    hi, lo = max(x, y), min(x, y)
    region = region_classify_reciprocal(n, hi, lo)
    inv_r = hi + lo
    inv_r_prime = 1 - inv_r
    if region == "IV":
        return lo <= hi + inv_r_prime / n
    if region == "V":
        return inv_r >= Fraction(3 * n - 1, n * n - 1) + 1
    return None


def region_verdicts(n, x, y):
    """Bounded-if verdicts from the region propositions (``n >= 2``)."""
    region = region_classify_reciprocal(n, x, y)
    hi, lo = max(x, y), min(x, y)
    s = hi + lo
    inv_r_prime = 1 - s
    out = []
    if region == "I":
        out.append(_bounded((n - 1) * inv_r_prime, "region-I", "local L2 case"))
    elif region == "II":
        out.append(_bounded(Fraction(n - 1, 2) + n * (inv_r_prime - HALF), "region-II", "Banach case (a)"))
    elif region == "III":
        out.append(_bounded(n * (HALF - lo) - inv_r_prime, "region-III", "Banach case (b)/(c)"))
    elif region in ("IV", "V", "shaded"):
        d1 = delta_one(n, hi, lo)
        d2 = delta_two(n, hi, lo)
        if region == "shaded" or d2 is None:
            out.append(_bounded(d1, f"region-{region}", "non-Banach part 1, delta_1"))
        else:
            use_two = crossover_prediction(n, hi, lo)
            value, tag = (d2, "delta_2") if use_two else (d1, "delta_1")
            out.append(_bounded(value, f"region-{region}", f"non-Banach part 1, {tag}"))
    elif region == "VI":
        v = part_two_delta(n, hi, lo)
        if v is not None:
            theta, value, printed = v
            out.append(
                _bounded(
                    value,
                    "region-VI",
                    f"part-2 interpolated, theta={theta}; printed form theta*n*alpha-1 = {printed}",
                )
            )
    elif region == "VII":
        out.append(_bounded(interpolated_delta(n, x, y), "region-VII", "interpolated, non-sharp"))
    return out


def part_two_delta(n, hi, lo):
    """Interpolation between ``(2,2,1)`` and the segment ``{1/p = a_n}``.

    Solves ``lo = (1-theta)/2 + theta a_n`` and ``hi = (1-theta)/2 + theta u``
    for ``theta`` and ``u = 1/q``. Returns ``(theta, theta (n alpha - 1),
    theta n alpha - 1)`` or ``None`` when ``u`` falls outside ``(a_n, 1]``.
    ``alpha(2n/(n+1), q)`` is the limit value on the edge ``1/p1 = a_n``.
    """
    a = a_n(n)
    theta = (lo - HALF) / (a - HALF)
    if not (0 < theta < 1):
        return None
    u = (hi - (1 - theta) / 2) / theta
    if not (a < u <= 1):
        return None
    al = alpha_limit(n, a, u)
    return theta, theta * (n * al - 1), theta * n * al - 1


# --- theorem verdicts -------------------------------------------------------------------


def _theorem_4_5(n, x, y):
    """Best ``n alpha(q1, q2) - 1`` over admissible ``(1/q1, 1/q2) >= (x, y)``.

    ``alpha`` and ``u + v - alpha(u, v)`` are non-decreasing in each
    variable, so the optimum sits at the lower corner ``(max(x, a), max(y, a))``
    whenever that corner satisfies the side condition. Feasibility is
    tested on the closure of the admissible set.
    """
    a = a_n(n)
    u, v = max(x, a), max(y, a)
    al = alpha_limit(n, u, v)
    if u + v - (x + y) <= al:
        return n * al - 1, (u, v)
    return None


def critical_delta(n, triple: ExponentTriple):
    """All known verdicts for ``S^delta : L^p1 x L^p2 -> L^p`` in dimension ``n``.

    Returns
    -------
    list of Verdict
        Sorted by (status, threshold). May contain a single ``unknown``.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if not triple.holder:
        raise DomainError("critical_delta needs a Hölder triple")
    x, y = triple.inv_p1, triple.inv_p2
    s = x + y
    h = HALF
    out = [_bounded(Fraction(2 * n - 1, 2), "prop4.1(i)", "integrable kernel")]

    # Prop 4.1 (ii): non-integrable S(h, h)
    thr = n * (s - 1) - h
    if thr >= 0:
        out.append(_unbounded(thr, "prop4.1(ii)", "kernel not in L^p"))
    # Prop 4.1 (iii): reduction to the linear operator on three lines
    lines = []
    if y == 0:
        lines.append(x)
    if x == 0:
        lines.append(y)
    if s == 1:
        lines.append(x)
    for r in lines:
        thr = n * abs(r - h) - h
        if thr >= 0:
            out.append(_unbounded(thr, "prop4.1(iii)", "linear Bochner-Riesz obstruction"))

    if n == 1:
        out.extend(_one_dimensional(x, y))
    else:
        a = a_n(n)
        if x > a and y > a:
            out.append(_bounded(n * alpha_reciprocal(n, x, y) - 1, "th4.2", "n*alpha(p1,p2)-1"))
        best = _theorem_4_5(n, x, y)
        if best is not None and not (x > a and y > a and best[1] == (x, y)):
            out.append(_bounded(best[0], "th4.5", f"with (1/q1,1/q2)=({best[1][0]},{best[1][1]})"))
        if (x, y) == (h, h):
            out.append(_bounded(0, "thm:221"))
            out.append(_unbounded(0, "thm:221", "half-space counterexample"))
        if (x, y) in ((h, 0), (0, h)):
            out.append(_bounded(Fraction(n - 1, 2), "th4.7"))
            out.append(_unbounded(0, "thm:221-remark", "second-slot half-space counterexample"))
        if (x, y) in ((1, 0), (0, 1)):
            out.append(_bounded(Fraction(n, 2), "thm4.88"))
        out.extend(region_verdicts(n, x, y))
        if region_classify_reciprocal(n, x, y) != "VII":
            out.append(_bounded(interpolated_delta(n, x, y), "interpolation", "interpolated"))
    out.sort(key=lambda v: (v.status, v.threshold if v.threshold is not None else ZERO, v.source))
    return out


def _one_dimensional(x, y):
    h = HALF
    s = x + y
    out = []
    if s > 1:
        return out
    if (x, y) in ((h, h), (h, 0), (0, h)):
        out.append(_bounded(0, "BR-1dim(ii)", "endpoint"))
        out.append(_unbounded(0, "BR-1dim", "optimal at endpoints"))
        return out
    if 0 < x < h and 0 < y < h and h < s < 1:
        out.append(_bounded(0, "BR-1dim(i)", "strict local L2", strict=False))
        return out
    out.append(_bounded(0, "BR-1dim(iii)", "Banach triangle"))
    if x == 0 or y == 0 or s == 1:
        out.append(_unbounded(0, "BR-1dim", "optimal on the Banach boundary"))
    return out


def best_thresholds(verdicts):
    """``(bounded, unbounded)``: the least bounded-if and the largest unbounded-if verdict."""
    bounded = [v for v in verdicts if v.status == BOUNDED]
    unbounded = [v for v in verdicts if v.status == UNBOUNDED]

    def bkey(v):
        return (v.threshold, 0 if not v.strict else 1)

    def ukey(v):
        return (v.threshold, 0 if v.strict else 1)

    best_b = min(bounded, key=bkey) if bounded else None
    best_u = max(unbounded, key=ukey) if unbounded else None
    return best_b, best_u


def contradiction(verdicts):
    """Return a pair ``(bounded, unbounded)`` that overlaps on some ``delta >= 0``, else ``None``."""
    for b in (v for v in verdicts if v.status == BOUNDED):
        start = max(b.threshold, ZERO)
        start_open = b.strict and b.threshold >= 0
        for u in (v for v in verdicts if v.status == UNBOUNDED):
            if u.threshold > start or (u.threshold == start and not start_open and not u.strict):
                return b, u
    return None


def lattice(step):
    """Reciprocal pairs ``(x, y)`` on ``[0, 1]**2`` with spacing ``step``."""
    step = to_fraction(step)
    k = int(1 / step)
    if Fraction(1, k) != step:
        raise DomainError("lattice step must be 1/k")
    vals = [Fraction(i, k) for i in range(k + 1)]
    return [(x, y) for x in vals for y in vals]


def consistency_sweep(ns=(1, 2, 3), step=Fraction(1, 60)):
    """Count contradictions of :func:`critical_delta` over a lattice; returns ``(checked, failures)``."""
    checked = 0
    failures = []
    for n in ns:
        for x, y in lattice(step):
            triple = ExponentTriple.from_reciprocals(x, y)
            bad = contradiction(critical_delta(n, triple))
            checked += 1
            if bad:
                failures.append((n, x, y, bad))
    return checked, failures


def threshold_rows(n, step=Fraction(1, 12)):
    """Rows ``(n, p1, p2, p, region, bounded_if, unbounded_if, source)`` over a lattice."""
    rows = []
    for x, y in lattice(step):
        triple = ExponentTriple.from_reciprocals(x, y)
        verdicts = critical_delta(n, triple)
        best_b, best_u = best_thresholds(verdicts)
        sources = [v.source for v in (best_b, best_u) if v is not None]
        rows.append(
            (
                n,
                format_exponent(x),
                format_exponent(y),
                format_exponent(x + y),
                region_classify_reciprocal(n, x, y),
                best_b.describe() if best_b else "",
                best_u.describe() if best_u else "",
                ";".join(sources),
            )
        )
    return rows


CSV_HEADER = ("n", "p1", "p2", "p", "region", "bounded_if", "unbounded_if", "source")


def threshold_csv(n, step=Fraction(1, 12)) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(threshold_rows(n, step))
    return buf.getvalue()
