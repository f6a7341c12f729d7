"""Bilinear multiplier engines and the concrete operators built on them.

The discretized operator is

    T_m(f, g)(x) = L**(-2n) sum_{xi, eta} exp(2 pi i x.(xi + eta)) m(xi, eta) F(xi) G(eta)

with ``F = dft(f)`` and ``G = dft(g)``. Two engines evaluate it:
``frequency_loop`` performs one inverse DFT per ``eta`` (batched), and
``kernel_convolution`` sums the kernel ``K(y, z) = check m(y, z)`` against
``f(x - y) g(x - z)`` directly. Both are exact for the discrete operator;
they differ only in round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SpaceMismatchError
from .fieldgrid import (
    FREQUENCY,
    PHYSICAL,
    GridFunction,
    GridSpec,
    centered_ifft,
    check_guard_band,
    dft,
    idft,
)
from .symbols import Symbol, br_profile, lift_biradial

ENGINES = ("frequency_loop", "kernel_convolution")

# symbol entries processed per batch in the frequency loop
_BATCH_ENTRIES = 1 << 22


@dataclass(frozen=True)
class BilinearOp:
    """A bilinear Fourier multiplier bound to an evaluation engine."""

    symbol: Symbol
    engine: str = "frequency_loop"

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise DomainError(f"unknown engine {self.engine!r}; choose from {ENGINES}")

    @property
    def spec(self):
        return self.symbol.spec

    def __call__(self, f, g, check_aliasing=False):
        return apply(self, f, g, check_aliasing=check_aliasing)


def _as_physical(f: GridFunction, spec: GridSpec):
    if f.spec != spec:
        raise SpaceMismatchError("input grid does not match the operator grid")
    return f if f.space == PHYSICAL else idft(f)


def _phase(spec: GridSpec):
    """``exp(2 pi i x_j k / L)`` for centered indices, exact modulo ``N``."""
    N = spec.points_per_axis
    idx = np.arange(N) - N // 2
    return np.exp(2j * np.pi * (np.outer(idx, idx) % N) / N)


def apply(op: BilinearOp, f: GridFunction, g: GridFunction, check_aliasing=False) -> GridFunction:
    """Evaluate ``T_m(f, g)`` on the grid.

    Parameters
    ----------
    op : BilinearOp
    f, g : GridFunction
        Physical- or frequency-space inputs on the operator's grid.
    check_aliasing : bool
        Raise :class:`AliasingError` when either spectrum reaches past the
        guard radius ``N/(4L)``.

    Returns
    -------
    GridFunction
        Physical-space output.
    """
    spec = op.spec
    f = _as_physical(f, spec)
    g = _as_physical(g, spec)
    if check_aliasing:
        check_guard_band(f, g)
    if op.engine == "frequency_loop":
        out = _frequency_loop(op.symbol, dft(f).samples, dft(g).samples)
    else:
        out = _kernel_convolution(op.symbol, f.samples, g.samples)
    return GridFunction(spec, out, PHYSICAL)


def _frequency_loop(symbol: Symbol, F, G):
    spec = symbol.spec
    n, N, L = spec.dim, spec.points_per_axis, spec.extent
    m = symbol.values
    E = _phase(spec)
    xi_axes = tuple(range(n))
    scale = N**n / L**n / L**n  # idft weight times the eta cell volume
    out = np.zeros((N,) * n, dtype=complex)
    # batches of eta rows along the first eta axis, accumulated in ascending order
    rows = max(1, min(N, _BATCH_ENTRIES // max(1, N ** (2 * n - 1))))
    for start in range(0, N, rows):
        stop = min(N, start + rows)
        block = m[(slice(None),) * n + (slice(start, stop),)]
        weighted = block * F.reshape(F.shape + (1,) * n)
        inner = centered_ifft(weighted, axes=xi_axes)
        inner = inner * G[start:stop][(None,) * n]
        if n == 1:
            out += np.einsum("ab,ab->a", inner, E[:, start:stop])
        else:
            out += np.einsum("abcd,ac,bd->ab", inner, E[:, start:stop], E)
    return out * scale


def _kernel_convolution(symbol: Symbol, f, g):
    spec = symbol.spec
    n, N, h = spec.dim, spec.points_per_axis, spec.spacing
    K = symbol.kernel_samples()
    out = np.zeros((N,) * n, dtype=complex)
    cell = h ** (2 * n)
    base = np.arange(N)
    for x in np.ndindex(*(N,) * n):
        # centered index of y = x - u for every grid point u, per axis
        diff = [(xa - base + N // 2) % N for xa in x]
        if n == 1:
            Kx = K[np.ix_(diff[0], diff[0])]
            out[x] = f @ Kx @ g
        else:
            Kx = K[np.ix_(diff[0], diff[1], diff[0], diff[1])]
            out[x] = np.einsum("abcd,ab,cd->", Kx, f, g)
    return out * cell


def adjoint_first(symbol: Symbol, g: GridFunction, w: GridFunction) -> GridFunction:
    """Adjoint of ``f -> T_m(f, g)`` applied to ``w`` (inner product ``h**n sum``)."""
    spec = symbol.spec
    n, N, L = spec.dim, spec.points_per_axis, spec.extent
    G = dft(_as_physical(g, spec)).samples
    W = dft(_as_physical(w, spec)).samples
    idx = np.arange(N)
    wrap = (idx[:, None] + idx[None, :] - N // 2) % N  # index of xi + eta
    if n == 1:
        Wsum = W[wrap]
    else:
        Wsum = W[wrap[:, None, :, None], wrap[None, :, None, :]]
    prod = np.conj(symbol.values) * Wsum * np.conj(G)[(None,) * n]
    V = prod.reshape((N,) * n + (-1,)).sum(axis=-1) / L**n
    return idft(GridFunction(spec, V, FREQUENCY))


def adjoint_second(symbol: Symbol, f: GridFunction, w: GridFunction) -> GridFunction:
    """Adjoint of ``g -> T_m(f, g)`` applied to ``w``."""
    return adjoint_first(symbol.swapped(), f, w)


def bochner_riesz(delta, R, f: GridFunction, g: GridFunction, engine="frequency_loop", check_aliasing=False):
    """Bilinear Bochner-Riesz mean ``S^delta_R(f, g)``."""
    symbol = lift_biradial(br_profile(delta, R), f.spec, strict=False)
    return apply(BilinearOp(symbol, engine), f, g, check_aliasing=check_aliasing)


def bochner_riesz_op(delta, R, spec: GridSpec, engine="frequency_loop") -> BilinearOp:
    return BilinearOp(lift_biradial(br_profile(delta, R), spec, strict=False), engine)


# --- linear operators -------------------------------------------------------


def _circle_nodes(count):
    theta = 2 * np.pi * np.arange(count) / count
    return np.cos(theta), np.sin(theta), 2 * np.pi / count


def nonuniform_transform(f: GridFunction, points):
    """``h**n sum_x f(x) exp(-2 pi i x.zeta)`` at arbitrary frequencies ``zeta``.

    ``points`` has shape ``(M, n)``. Separable per axis, so the cost is
    ``O(M N**n)``.
    """
    spec = f.spec
    x = spec.axis()
    pts = np.asarray(points, dtype=float)
    cell = spec.spacing**spec.dim
    if spec.dim == 1:
        E = np.exp(-2j * np.pi * np.outer(pts[:, 0], x))
        return E @ f.samples * cell
    E1 = np.exp(-2j * np.pi * np.outer(pts[:, 0], x))
    E2 = np.exp(-2j * np.pi * np.outer(pts[:, 1], x))
    return np.einsum("mi,ij,mj->m", E1, f.samples, E2) * cell


def restriction_extension(lam, f: GridFunction, nodes=None) -> GridFunction:
    """Restriction-extension operator ``R_lambda``.

    ``R_lambda f(x) = lambda**(n-1) int_{S^{n-1}} exp(2 pi i lambda x.omega) f^(lambda omega) d omega``.
    For ``n = 2`` the circle integral uses the trapezoid rule with ``8N``
    nodes (or ``nodes``); ``f^`` at off-grid frequencies is the exact
    trigonometric sum over the samples. For ``n = 1`` the sphere is the
    two-point set ``{-1, 1}`` with counting measure.
    """
    spec = f.spec
    if f.space != PHYSICAL:
        f = idft(f)
    if not lam > 0:
        raise DomainError("lambda must be positive")
    if lam > spec.nyquist + 1e-12:
        raise DomainError(f"lambda={lam:g} exceeds the Nyquist radius {spec.nyquist:g}")
    x = spec.axis()
    if spec.dim == 1:
        pts = np.array([[lam], [-lam]])
        vals = nonuniform_transform(f, pts)
        out = np.exp(2j * np.pi * lam * x) * vals[0] + np.exp(-2j * np.pi * lam * x) * vals[1]
        return GridFunction(spec, out, PHYSICAL)
    if spec.dim != 2:
        raise DomainError("restriction_extension supports n = 1, 2")
    count = nodes or 8 * spec.points_per_axis
    c, s, w = _circle_nodes(count)
    pts = lam * np.stack([c, s], axis=1)
    vals = nonuniform_transform(f, pts)
    P1 = np.exp(2j * np.pi * np.outer(x, pts[:, 0]))
    P2 = np.exp(2j * np.pi * np.outer(x, pts[:, 1]))
    out = np.einsum("im,jm,m->ij", P1, P2, vals * w) * lam ** (spec.dim - 1)
    return GridFunction(spec, out, PHYSICAL)


def annulus_average(lam, mu, f: GridFunction) -> GridFunction:
    """Frequency projection onto the closed annulus ``lam <= |xi| <= mu``."""
    spec = f.spec
    if not mu > lam:
        raise DomainError("need mu > lambda")
    if lam < 0:
        raise DomainError("lambda must be >= 0")
    if mu > spec.nyquist + 1e-12:
        raise DomainError(f"mu={mu:g} exceeds the Nyquist radius {spec.nyquist:g}")
    F = dft(f) if f.space == PHYSICAL else f
    rad = spec.freq_radius()
    tol = 1e-12
    mask = (rad >= lam - tol) & (rad <= mu + tol)
    out = F.with_samples(np.where(mask, F.samples, 0))
    return idft(out) if f.space == PHYSICAL else out


def halfspace_mask(spec: GridSpec, v):
    """Indicator of ``{xi : xi.v >= 0}`` on the centered frequency grid."""
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size != spec.dim or not math.isclose(float(np.linalg.norm(v)), 1.0, rel_tol=1e-9):
        raise DomainError("v must be a unit vector of the grid dimension")
    proj = sum(c * vi for c, vi in zip(spec.freq_coords(), v))
    return (proj >= -1e-12).astype(float)


def halfspace_witness(v, variant, f: GridFunction, g: GridFunction) -> GridFunction:
    """Half-space counterexample operators.

    ``variant='joint'`` returns ``(f g)^ restricted to {xi.v >= 0}``, inverted;
    ``variant='second_slot'`` returns ``f * (g^ restricted to {eta.v >= 0})``, inverted.
    """
    spec = f.spec
    f = _as_physical(f, spec)
    g = _as_physical(g, spec)
    mask = halfspace_mask(spec, v)
    if variant == "joint":
        prod = dft(f * g)
        return idft(prod.with_samples(prod.samples * mask))
    if variant == "second_slot":
        G = dft(g)
        return f * idft(G.with_samples(G.samples * mask))
    raise DomainError("variant must be 'joint' or 'second_slot'")


def halfspace_symbol(spec: GridSpec, v, variant) -> Symbol:
    """Symbol of :func:`halfspace_witness` (no wrap-around of ``xi + eta``)."""
    mask = halfspace_mask(spec, v)
    n, N = spec.dim, spec.points_per_axis
    if variant == "second_slot":
        vals = np.broadcast_to(mask.reshape((1,) * n + mask.shape), (N,) * (2 * n))
        return Symbol(spec, np.array(vals), f"halfspace-second{tuple(v)}")
    if variant != "joint":
        raise DomainError("variant must be 'joint' or 'second_slot'")
    v = np.asarray(v, dtype=float)
    freq = spec.freq_axis()
    grids = np.meshgrid(*([freq] * (2 * n)), indexing="ij", sparse=True)
    proj = sum((grids[a] + grids[n + a]) * v[a] for a in range(n))
    vals = (proj >= -1e-12).astype(float) * np.ones((N,) * (2 * n))
    return Symbol(spec, vals, f"halfspace-joint{tuple(v)}")


# --- torus partial sums -----------------------------------------------------


def torus_partial_sum(delta, R, Fcoef: dict, Gcoef: dict, spec: GridSpec) -> GridFunction:
    """Bochner-Riesz partial sum of the product of two Fourier series.

    ``sum_{|m|^2+|k|^2 <= R^2} (1 - (|m|^2+|k|^2)/R^2)**delta F(m) G(k) e^{2 pi i (m+k).x}``
    evaluated at the points of ``spec`` (period 1 in every variable).

    Parameters
    ----------
    Fcoef, Gcoef : dict
        Finite maps from integer tuples (or ints when ``n = 1``) to complex.
    """
    if delta < 0:
        raise DomainError("delta must be >= 0")
    n = spec.dim

    def key(m):
        return (int(m),) if np.isscalar(m) else tuple(int(a) for a in m)

    F = {key(m): complex(c) for m, c in Fcoef.items()}
    G = {key(k): complex(c) for k, c in Gcoef.items()}
    combined: dict = {}
    for m, fm in sorted(F.items()):
        if len(m) != n:
            raise DomainError("coefficient index has the wrong dimension")
        m2 = sum(a * a for a in m)
        for k, gk in sorted(G.items()):
            r2 = m2 + sum(a * a for a in k)
            if r2 > R * R:
                continue
            w = 1.0 if delta == 0 else (1.0 - r2 / (R * R)) ** delta
            q = tuple(a + b for a, b in zip(m, k))
            combined[q] = combined.get(q, 0) + w * fm * gk
    x = spec.axis()
    out = np.zeros(spec.shape, dtype=complex)
    for q, c in sorted(combined.items()):
        if c == 0:
            continue
        term = np.exp(2j * np.pi * q[0] * x)
        if n == 2:
            term = np.outer(term, np.exp(2j * np.pi * q[1] * x))
        out += c * term
    return GridFunction(spec, out, PHYSICAL)
