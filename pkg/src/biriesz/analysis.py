"""Norm functionals, empirical operator norms, rate fits, and localization nets."""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError, NonFiniteError, ResourceCapError, UnderResolvedError
from .fieldgrid import (
    FREQUENCY,
    PHYSICAL,
    GridFunction,
    GridSpec,
    centered_fft,
    centered_ifft,
    dft,
    idft,
    lp_norm,
    project_to_band,
    save_grid,
)
from .indices import ExponentTriple
from .operators import BilinearOp, adjoint_first, adjoint_second, apply
from .symbols import Symbol, dyadic_spherical, lift_biradial

log = logging.getLogger(__name__)

SAMPLE_CAP = 1 << 24
DEFAULT_SEED = 0xB1E55ED


def _check_cap(spec: GridSpec, force=False):
    total = spec.points_per_axis ** (2 * spec.dim)
    if total > SAMPLE_CAP and not force:
        raise ResourceCapError(f"N^(2n) = {total} exceeds the cap {SAMPLE_CAP}")


def worker_count():
    """Thread-pool size from ``BIRIESZ_THREADS`` (default 1)."""
    raw = os.environ.get("BIRIESZ_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# --- symbol functionals -----------------------------------------------------------------


def a1_functional(symbol: Symbol, force=False):
    """``A1 = int int |check m(y, z)| dy dz`` by a Riemann sum over the physical grid."""
    spec = symbol.spec
    _check_cap(spec, force)
    h = spec.spacing
    return float(np.abs(symbol.kernel_samples()).sum() * h ** (2 * spec.dim))


def a2_functional(symbol: Symbol):
    """``A2 = sup_xi (int |m(xi - eta, eta)|^2 d eta)^(1/2)``.

    ``xi`` runs over all sums of two grid frequencies; pairs that leave the
    window count as zero (no wrap-around).
    """
    spec = symbol.spec
    n, N, L = spec.dim, spec.points_per_axis, spec.extent
    sq = np.abs(symbol.values) ** 2
    if n == 1:
        # slice sums along anti-diagonals i + k = const
        flipped = sq[::-1, :]
        sums = np.array([np.trace(flipped, offset=o) for o in range(-(N - 1), N)])
    else:
        sums = np.zeros((2 * N - 1,) * n)
        for k in np.ndindex(*(N,) * n):
            sl = tuple(slice(ka, ka + N) for ka in k)
            sums[sl] += sq[(Ellipsis,) + k]
    return float(math.sqrt(sums.max() / L**n))


def sobolev_norm(f, s, q, spec: GridSpec | None = None, homogeneous=False):
    """Bessel-potential Sobolev norm ``|| (1 + 4 pi^2 |xi|^2)^(s/2) f^ check ||_q``.

    With ``homogeneous=True`` the multiplier is ``(2 pi |xi|)^s`` and the
    zero frequency is mapped to 0. ``f`` is a physical grid function or a
    raw array with ``spec``.
    """
    if q < 1:
        raise DomainError("q must be >= 1")
    if s < 0:
        raise DomainError("s must be >= 0")
    if not isinstance(f, GridFunction):
        if spec is None:
            raise DomainError("raw arrays need a GridSpec")
        f = GridFunction(spec, f, PHYSICAL)
    if s == 0 and not homogeneous:
        return lp_norm(f, q)
    F = dft(f)
    rad = f.spec.freq_radius()
    if homogeneous:
        with np.errstate(divide="ignore"):
            mult = np.where(rad > 0, (2 * np.pi * rad) ** s, 0.0)
        if s == 0:
            mult = np.ones_like(rad)
    else:
        mult = (1 + 4 * np.pi**2 * rad**2) ** (s / 2)
    out = idft(F.with_samples(F.samples * mult))
    return lp_norm(out, q)


def mixed_sobolev_norm(symbol: Symbol, s1, s2, force=False):
    """``(int (1+|y|^2)^(2 s1) (1+|z|^2)^(2 s2) |F^(y, z)|^2 dy dz)^(1/2)`` for ``F = m``.

    The transform of the symbol is taken over its ``2n`` frequency axes; the
    weights follow the printed exponents ``2 s1`` and ``2 s2``.
    """
    spec = symbol.spec
    _check_cap(spec, force)
    n = spec.dim
    K = symbol.kernel_samples()
    r2 = spec.radius() ** 2
    w1 = (1 + r2) ** (2 * s1)
    w2 = (1 + r2) ** (2 * s2)
    weight = w1.reshape(w1.shape + (1,) * n) * w2.reshape((1,) * n + w2.shape)
    total = np.sum(weight * np.abs(K) ** 2) * spec.spacing ** (2 * n)
    return float(math.sqrt(total))


# --- operator-norm ascent -------------------------------------------------------------


@dataclass
class NormEstimate:
    """Empirical lower bound for an operator norm, with its witnesses.

    ``value`` equals ``||T(f, g)||_p`` for the stored unit witnesses.
    """

    value: float
    triple: ExponentTriple
    witnesses: tuple
    trace: list
    seed: int
    seed_values: list = field(default_factory=list)

    def to_json(self, witness_files=()):
        return {
            "value": self.value,
            "triple": self.triple.to_json(),
            "seed": self.seed,
            "trace": [float(v) for v in self.trace],
            "witness_files": [str(p) for p in witness_files],
        }

    def save(self, directory, stem="witness"):
        """Write the witnesses as BRGRID1 files and the estimate as JSON."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        files = []
        for name, w in zip(("f", "g"), self.witnesses):
            path = directory / f"{stem}_{name}.brgrid"
            save_grid(path, w)
            files.append(path.name)
        payload = self.to_json(files)
        (directory / f"{stem}.json").write_text(json.dumps(payload, indent=2, sort_keys=True))
        return payload


def _norm(values, p, cell):
    mag = np.abs(values)
    if math.isinf(p):
        return float(mag.max())
    return float((cell * np.sum(mag**p)) ** (1.0 / p))


def _dual_direction(values, p, cell):
    """Derivative direction of ``||w||_p`` (up to a positive factor)."""
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0:
        return np.zeros_like(values)
    if math.isinf(p):
        # peak-sample surrogate: unit phase at the largest sample
        out = np.zeros_like(values)
        idx = np.unravel_index(np.argmax(mag), mag.shape)
        out[idx] = values[idx] / mag[idx] / cell
        return out
    floor = np.maximum(mag, 1e-12 * peak)
    return values * floor ** (p - 2)


class _Objective:
    def __init__(self, op: BilinearOp, triple: ExponentTriple, band):
        self.op = op
        self.spec = op.spec
        self.p1, self.p2, self.p = triple.floats()
        self.cell = self.spec.spacing**self.spec.dim
        self.band = band

    def normalize(self, f, p):
        f = project_to_band(f, self.band)
        norm = lp_norm(f, p)
        if not math.isfinite(norm) or norm == 0:
            raise NonFiniteError("witness collapsed to zero or non-finite norm")
        return f / norm

    def value(self, f, g):
        return _norm(apply(self.op, f, g).samples, self.p, self.cell)

    def gradient(self, f, g, slot):
        out = apply(self.op, f, g)
        w = GridFunction(self.spec, _dual_direction(out.samples, self.p, self.cell), PHYSICAL)
        if slot == 0:
            return adjoint_first(self.op.symbol, g, w)
        return adjoint_second(self.op.symbol, f, w)


def _ascent(obj: _Objective, f, g, budget, trace_owner):
    best = obj.value(f, g)
    trace = [best]
    step = 1.0
    for it in range(budget):
        slot = it % 2
        cur, p_slot = (f, obj.p1) if slot == 0 else (g, obj.p2)
        grad = obj.gradient(f, g, slot)
        gnorm = lp_norm(grad, 2)
        if not math.isfinite(gnorm):
            raise NonFiniteError("non-finite gradient", trace)
        if gnorm == 0:
            trace.append(best)
            continue
        direction = grad * (lp_norm(cur, 2) / gnorm)
        improved = False
        t = step
        for _ in range(12):
            cand = obj.normalize(cur + t * direction, p_slot)
            val = obj.value(cand, g) if slot == 0 else obj.value(f, cand)
            if not math.isfinite(val):
                raise NonFiniteError("non-finite objective", trace)
            if val > best:
                best = val
                if slot == 0:
                    f = cand
                else:
                    g = cand
                improved = True
                break
            t *= 0.5
        step = min(1.0, t * 2.0) if improved else max(t, 1e-6)
        trace.append(best)
    trace_owner.extend(trace)
    return best, f, g


def opnorm_lower(
    op: BilinearOp,
    triple: ExponentTriple,
    budget=50,
    seeds=8,
    seed=DEFAULT_SEED,
    band=None,
    initial=None,
    workers=None,
):
    """Lower bound for ``||T||_{L^p1 x L^p2 -> L^p}`` by alternating ascent.

    Each start draws random band-limited witnesses, then alternates
    normalized (sub)gradient steps in ``f`` and ``g`` on the unit spheres of
    ``L^p1`` and ``L^p2`` with backtracking halving. Witnesses stay inside
    the spectral radius ``band`` (default: the guard radius).

    Parameters
    ----------
    op : BilinearOp
    triple : ExponentTriple
        ``p1, p2 >= 1``; ``p`` may be below 1 or unrelated to ``p1, p2``.
    budget : int
        Ascent steps per start.
    seeds : int
        Number of random starts.
    seed : int
        Master seed; starts use independent child streams.
    initial : sequence of (GridFunction, GridFunction), optional
        Extra deterministic starting pairs, tried before the random ones.
    workers : int, optional
        Thread count (default from ``BIRIESZ_THREADS``).

    Returns
    -------
    NormEstimate
    """
    p1, p2, p = triple.floats()
    if p1 < 1 or p2 < 1:
        raise DomainError("ascent needs p1, p2 >= 1")
    spec = op.spec
    band = spec.guard_radius if band is None else band
    obj = _Objective(op, triple, band)
    children = np.random.SeedSequence(seed).spawn(seeds)

    starts = []
    for f0, g0 in initial or ():
        starts.append((f0, g0))
    for child in children:
        rng = np.random.default_rng(child)
        shape = spec.shape
        F = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        G = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        starts.append((idft(GridFunction(spec, F, FREQUENCY)), idft(GridFunction(spec, G, FREQUENCY))))

    def run(index):
        f0, g0 = starts[index]
        f = obj.normalize(f0, p1)
        g = obj.normalize(g0, p2)
        trace = []
        try:
            value, f, g = _ascent(obj, f, g, budget, trace)
        except NonFiniteError as exc:
            exc.trace = trace + exc.trace
            raise
        return value, f, g, trace

    count = workers or worker_count()
    if count > 1:
        with ThreadPoolExecutor(max_workers=count) as pool:
            results = list(pool.map(run, range(len(starts))))
    else:
        results = [run(i) for i in range(len(starts))]
    best_index = max(range(len(results)), key=lambda i: (results[i][0], -i))
    value, f, g, trace = results[best_index]
    # recompute on the stored witnesses so value is exact for them
    value = obj.value(f, g)
    log.debug("opnorm_lower %s: best start %d value %.6g", triple, best_index, value)
    return NormEstimate(value, triple, (f, g), trace, int(seed), [r[0] for r in results])


# --- dyadic growth rates ----------------------------------------------------------------


@dataclass
class RateFit:
    """Ordinary least-squares fit of ``log2 value`` against ``j``."""

    rate: float
    intercept: float
    residual: float
    js: list
    values: list
    estimates: list = field(default_factory=list)

    def to_rows(self):
        return [(j, v, math.log2(v) if v > 0 else float("-inf")) for j, v in zip(self.js, self.values)]


def log2_fit(js, values):
    """Slope, intercept and RMS residual of ``log2(values)`` against ``js``."""
    js = np.asarray(js, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.log2(np.asarray(values, dtype=float))
    if not np.all(np.isfinite(y)):
        raise DomainError("values must be positive and finite for a log fit")
    A = np.stack([js, np.ones_like(js)], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(coef[0]), float(coef[1]), float(math.sqrt(np.mean(resid**2)))


def check_resolvable(spec: GridSpec, j):
    """Raise unless the annulus of width ``2**-j`` spans at least four frequency cells."""
    if 2.0 ** (-j) * spec.extent < 4.0 - 1e-12:
        raise UnderResolvedError(f"j={j} needs extent >= {4 * 2.0**j:g}, grid has {spec.extent:g}")
    if spec.nyquist < 1.0:
        raise UnderResolvedError("frequency window must contain the unit sphere")


def dyadic_rate_fit(
    delta,
    triple: ExponentTriple,
    j_range,
    budget=20,
    spec: GridSpec | None = None,
    seeds=2,
    seed=DEFAULT_SEED,
    weighted=False,
    workers=None,
):
    """Fit ``rho`` in ``||T_{m^{j,delta}}|| ~ 2**(j rho)`` from ascent lower bounds."""
    if spec is None:
        spec = GridSpec(1, 256, 64.0)
    js = list(j_range)
    for j in js:
        check_resolvable(spec, j)
    estimates = []
    for j in js:
        symbol = lift_biradial(dyadic_spherical(delta, j, weighted), spec, strict=False)
        child = int(np.random.SeedSequence([seed, j]).generate_state(1)[0])
        est = opnorm_lower(BilinearOp(symbol), triple, budget=budget, seeds=seeds, seed=child, workers=workers)
        if not (est.value > 0 and math.isfinite(est.value)):
            raise NonFiniteError(f"lower bound at j={j} is not positive and finite", est.trace)
        estimates.append(est)
    values = [e.value for e in estimates]
    rate, intercept, resid = log2_fit(js, values)
    return RateFit(rate, intercept, resid, js, values, estimates)


def a2_rate_fit(delta, j_range, spec: GridSpec, weighted=True):
    """Fit the dyadic decay of ``a2_functional`` over annular pieces (no resolvability guard)."""
    js = list(j_range)
    values = [a2_functional(lift_biradial(dyadic_spherical(delta, j, weighted), spec, strict=False)) for j in js]
    rate, intercept, resid = log2_fit(js, values)
    return RateFit(rate, intercept, resid, js, values)


# --- localization nets -------------------------------------------------------------------


@dataclass
class Net:
    """Greedy ``rho/10`` net on the periodic grid with its first-come cells."""

    centers: np.ndarray
    rho: float
    spec: GridSpec
    cells: np.ndarray  # cell index for every grid point (flattened, row-major)

    @property
    def radius(self):
        return self.rho / 10.0

    def _tree(self, pts):
        L = self.spec.extent
        return cKDTree(np.mod(pts + L / 2, L), boxsize=L)

    def neighbor_count(self):
        """``K = max_i #{j : |x_i - x_j| < 2 rho}`` (self included)."""
        tree = self._tree(self.centers)
        counts = tree.query_ball_point(np.mod(self.centers + self.spec.extent / 2, self.spec.extent), 2 * self.rho * (1 - 1e-12), return_length=True)
        return int(np.max(counts))

    def min_separation(self):
        if len(self.centers) < 2:
            return math.inf
        tree = self._tree(self.centers)
        d, _ = tree.query(np.mod(self.centers + self.spec.extent / 2, self.spec.extent), k=2)
        return float(d[:, 1].min())

    def covering_radius(self):
        pts = _grid_points(self.spec)
        d, _ = self._tree(self.centers).query(np.mod(pts + self.spec.extent / 2, self.spec.extent))
        return float(d.max())


def _grid_points(spec: GridSpec):
    axes = [spec.axis()] * spec.dim
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def build_net(spec: GridSpec, rho, seed=None) -> Net:
    """Greedy ``rho/10``-separated, ``rho/10``-covering set of grid points.

    Grid points are visited in raster order, or in a random order drawn
    from ``seed``; a point becomes a center unless an earlier center lies
    within ``rho/10`` (periodic distance). Every grid point is assigned to
    the first center within ``rho/10``, which gives the partition into cells.
    """
    if rho < 4 * spec.spacing:
        raise DomainError(f"rho={rho:g} must be at least 4h = {4 * spec.spacing:g}")
    L = spec.extent
    pts = _grid_points(spec)
    shifted = np.mod(pts + L / 2, L)
    tree = cKDTree(shifted, boxsize=L)
    order = np.arange(len(pts)) if seed is None else np.random.default_rng(seed).permutation(len(pts))
    radius = rho / 10.0
    cells = np.full(len(pts), -1, dtype=np.int64)
    centers = []
    for idx in order:
        if cells[idx] >= 0:
            continue
        c = len(centers)
        centers.append(idx)
        nearby = np.asarray(tree.query_ball_point(shifted[idx], radius * (1 + 1e-12)), dtype=np.int64)
        free = nearby[cells[nearby] < 0]
        cells[free] = c
    return Net(pts[np.asarray(centers)], float(rho), spec, cells)
