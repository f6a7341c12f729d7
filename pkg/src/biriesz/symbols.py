"""Biradial profiles, sampled symbols, and the three symbol decompositions.

A symbol ``m(xi, eta)`` for ``xi, eta`` in ``R^n`` is stored on the
product of two centered frequency grids: an array of shape ``(N,)*2n``
whose first ``n`` axes index ``xi`` and last ``n`` axes index ``eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DomainError, UnderResolvedError
from .fieldgrid import (
    GridSpec,
    centered_fft,
    decode_grid,
    encode_grid,
    make_annulus_chi,
    make_partition_phi,
    make_partition_phi0,
    plateau,
)


@dataclass(frozen=True)
class BiradialProfile:
    """Profile ``m0(s, t)`` on ``[0, inf)**2`` with support and scale metadata.

    Parameters
    ----------
    function : callable
        Vectorized ``(s, t) -> values``; must broadcast.
    support_radius : float or None
        ``R`` with ``m0 = 0`` when ``s**2 + t**2 > R**2``; ``None`` if unbounded.
    smooth_scale : float
        Finest oscillation scale; a frequency grid must have spacing at most
        a quarter of it for the lift to be trusted.
    name : str
        Label for reports.
    """

    function: Callable
    support_radius: float | None
    smooth_scale: float
    name: str = "profile"
    bound: float | None = field(default=None, compare=False)

    def eval(self, s, t):
        s = np.abs(np.asarray(s, dtype=float))
        t = np.abs(np.asarray(t, dtype=float))
        return np.asarray(self.function(s, t), dtype=float) * np.ones(np.broadcast(s, t).shape)

    __call__ = eval

    def rescaled(self, factor):
        """Profile ``m0(s / factor, t / factor)`` (support grows by ``factor``)."""
        fn = self.function
        radius = None if self.support_radius is None else self.support_radius * factor
        return BiradialProfile(
            lambda s, t: fn(s / factor, t / factor),
            radius,
            self.smooth_scale * factor,
            f"{self.name}@x{factor:g}",
            self.bound,
        )


class Symbol:
    """Sampled multiplier on the ``(xi, eta)`` frequency product grid.

    Parameters
    ----------
    spec : GridSpec
        The ``n``-dimensional grid of the functions the symbol acts on.
    values : array_like
        Shape ``(N,)*2n``, centered frequency order, ``xi`` axes first.
    """

    __slots__ = ("spec", "values", "sup_norm", "label")

    def __init__(self, spec: GridSpec, values, label="symbol"):
        arr = np.array(values)
        if not np.iscomplexobj(arr):
            arr = arr.astype(float)
        shape = (spec.points_per_axis,) * (2 * spec.dim)
        if arr.shape != shape:
            raise DomainError(f"symbol shape {arr.shape} does not match {shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("symbol values must be finite")
        arr.flags.writeable = False
        self.spec = spec
        self.values = arr
        self.sup_norm = float(np.abs(arr).max())
        self.label = label

    @classmethod
    def from_function(cls, spec: GridSpec, fn, label="symbol"):
        """Sample ``fn(xi_1..xi_n, eta_1..eta_n)`` on the product grid."""
        freq = spec.freq_axis()
        grids = np.meshgrid(*([freq] * (2 * spec.dim)), indexing="ij", sparse=True)
        vals = np.asarray(fn(*grids)) * np.ones((spec.points_per_axis,) * (2 * spec.dim))
        return cls(spec, vals, label)

    @classmethod
    def constant(cls, spec: GridSpec, value=1.0):
        return cls(spec, np.full((spec.points_per_axis,) * (2 * spec.dim), value), "constant")

    @property
    def n(self):
        return self.spec.dim

    def swapped(self) -> "Symbol":
        """``(xi, eta) -> m(eta, xi)``."""
        n = self.n
        axes = tuple(range(n, 2 * n)) + tuple(range(n))
        return Symbol(self.spec, np.transpose(self.values, axes), self.label + "^T")

    def scaled(self, factor) -> "Symbol":
        return Symbol(self.spec, self.values * factor, self.label)

    def kernel_samples(self):
        """``check m`` on the physical product grid, weight ``L**(-2n)``.

        The kernel ``K(y, z) = check m(-y, -z)`` of the operator is obtained by
        reversing both arguments; see :mod:`operators`.
        """
        spec = self.spec
        N = spec.points_per_axis
        vals = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(self.values)))
        return vals * N ** (2 * spec.dim) / spec.extent ** (2 * spec.dim)

    def to_bytes(self) -> bytes:
        spec = self.spec
        header = {"dim": 2 * spec.dim, "n": spec.points_per_axis, "extent": spec.extent, "space": "frequency"}
        return encode_grid(self.values, header)

    def save(self, path):
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path):
        header, arr = decode_grid(Path(path).read_bytes())
        if header.get("space") != "frequency" or int(header["dim"]) % 2:
            raise DomainError("symbol files must be frequency-space with even dimension")
        spec = GridSpec(int(header["dim"]) // 2, int(header["n"]), float(header["extent"]))
        if np.all(arr.imag == 0):
            arr = arr.real
        return cls(spec, arr, Path(path).stem)


def lift_biradial(profile: BiradialProfile, spec: GridSpec, strict=True) -> Symbol:
    """Sample ``m(xi, eta) = m0(|xi|, |eta|)`` on the product grid.

    Raises
    ------
    UnderResolvedError
        If ``strict`` and the frequency spacing ``1/L`` exceeds
        ``profile.smooth_scale / 4``.
    """
    if strict and 1.0 / spec.extent > profile.smooth_scale / 4.0 + 1e-15:
        raise UnderResolvedError(
            f"frequency spacing {1 / spec.extent:g} too coarse for profile scale {profile.smooth_scale:g}"
        )
    rad = spec.freq_radius()
    n = spec.dim
    s = rad.reshape(rad.shape + (1,) * n)
    t = rad.reshape((1,) * n + rad.shape)
    return Symbol(spec, profile.eval(s, t), profile.name)


def br_profile(delta, R=1.0) -> BiradialProfile:
    """Bochner-Riesz profile ``(1 - (s**2 + t**2)/R**2)_+**delta``.

    For ``delta = 0`` this is the indicator of the closed disc of radius ``R``.
    """
    if delta < 0:
        raise DomainError("delta must be >= 0")
    if R <= 0:
        raise DomainError("R must be > 0")

    def fn(s, t):
        u = 1.0 - (s * s + t * t) / (R * R)
        inside = u >= 0
        if delta == 0:
            return inside.astype(float)
        return np.where(inside, np.abs(u) ** delta, 0.0)

    return BiradialProfile(fn, float(R), float(R), f"br(delta={delta:g},R={R:g})", 1.0)


def dyadic_spherical(delta, j, weighted=False) -> BiradialProfile:
    """Annular piece ``[2**j u]**delta chi(2**j u)`` with ``u = 1 - s**2 - t**2``.

    Supported where ``u`` lies in ``[5/8, 3/2] * 2**-j`` (inside
    ``[2**(-j-1), 2**(-j+1)]``). With ``weighted=True`` the piece carries its
    factor ``2**(-j delta)``, so that summing weighted pieces over ``j``
    rebuilds ``br_profile(delta, 1)`` away from the boundary.
    """
    if j < 0 or int(j) != j:
        raise DomainError("j must be a non-negative integer")
    chi = make_annulus_chi()
    scale = 2.0**j
    weight = scale ** (-delta) if weighted else 1.0

    def fn(s, t):
        u = scale * (1.0 - s * s - t * t)
        pos = np.where(u > 0, u, 0.0)
        return weight * np.where(u > 0, pos**delta * chi(pos), 0.0)

    return BiradialProfile(
        fn, 1.0, 2.0 ** (-j), f"sph(delta={delta:g},j={j}{',w' if weighted else ''})", weight * 2.0**delta
    )


def compact_spectrum_profile(band, nodes=400) -> BiradialProfile:
    """Separable profile ``b(s) b(t)`` whose 2-D Fourier transform lives in ``[-band, band]**2``.

    ``b`` is the cosine transform of a Gaussian of width ``band/6`` tapered
    smoothly to zero on ``|y| in [3/4, 1] * band``; the transform is
    evaluated by Gauss-Legendre quadrature, so ``b`` is exact to round-off
    and decays like ``exp(-2 pi**2 (band/6)**2 s**2)`` in practice.
    """
    if band <= 0:
        raise DomainError("band must be > 0")
    x, w = np.polynomial.legendre.leggauss(int(nodes))
    y = band * x
    weights = band * w * np.exp(-0.5 * (6.0 * y / band) ** 2) * plateau(y / band, 0.75, 1.0)

    def b(s):
        uniq, inv = np.unique(np.asarray(s, dtype=float), return_inverse=True)
        vals = np.cos(2 * np.pi * np.outer(uniq, y)) @ weights
        return vals[inv].reshape(np.shape(s))

    def fn(s, t):
        return b(s) * b(t)

    peak = float(weights.sum() ** 2)
    return BiradialProfile(fn, None, 6.0 / (2 * np.pi * band), f"compact(band={band:g})", peak)


# --- radial-scale decomposition ------------------------------------------


@dataclass
class _Windowed:
    """Trigonometric expansion of an evenly extended profile on an auxiliary grid."""

    extent: float
    coeffs: np.ndarray  # DFT samples in centered order, weight (extent/M)^2
    freqs: np.ndarray

    def evaluate(self, s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        bshape = np.broadcast(s, t).shape
        s_b, t_b = np.broadcast_to(s, bshape), np.broadcast_to(t, bshape)
        us, s_idx = np.unique(s_b, return_inverse=True)
        ut, t_idx = np.unique(t_b, return_inverse=True)
        es = np.exp(2j * np.pi * np.outer(us, self.freqs))
        et = np.exp(2j * np.pi * np.outer(ut, self.freqs))
        table = (es @ self.coeffs @ et.T).real / self.extent**2
        return table[s_idx.ravel(), t_idx.ravel()].reshape(bshape)


def _aux_transform(profile: BiradialProfile, points, window):
    if window is None:
        if profile.support_radius is None:
            raise DomainError("radial_scale_piece needs a compactly supported profile or an explicit window")
        window = 4.0 * profile.support_radius
    M = points
    h = window / M
    axis = -window / 2 + h * np.arange(M)
    vals = profile.eval(axis[:, None], axis[None, :])
    coeffs = centered_fft(vals) * h * h
    freqs = (np.arange(M) - M // 2) / window
    return window, coeffs, freqs


def scale_window(ell):
    """Window in ``|tau|`` selecting the ``ell``-th dyadic frequency scale."""
    if ell == 0:
        return make_partition_phi0()
    phi = make_partition_phi()
    return lambda r: phi(r * 2.0 ** (-ell))


def radial_scale_piece(profile: BiradialProfile, ell, points=256, window=None) -> BiradialProfile:
    """Piece ``m0^(ell)`` of the dyadic radial-scale decomposition.

    The profile is extended evenly to ``R**2`` and transformed on an
    auxiliary periodic grid of ``points**2`` samples over a window of side
    ``window`` (default four times the support radius). Its transform is
    multiplied by ``phi0(|tau|)`` for ``ell = 0`` or ``phi(2**-ell |tau|)``
    otherwise, and the piece is the resulting trigonometric sum, evaluable
    anywhere. Pieces over ``ell = 0..L`` add up to the trigonometric
    interpolant of ``m0``, which matches ``m0`` exactly at the auxiliary
    nodes once ``2**L * 5/8`` exceeds the auxiliary Nyquist radius.

    Parameters
    ----------
    profile : BiradialProfile
    ell : int
        Scale index, ``>= 0``.
    points : int
        Auxiliary samples per axis.
    window : float, optional
        Side of the auxiliary window. Needed for profiles without compact
        support (they are then treated as periodic on the window).
    """
    if ell < 0 or int(ell) != ell:
        raise DomainError("ell must be a non-negative integer")
    extent, coeffs, freqs = _aux_transform(profile, points, window)
    tau = np.hypot(freqs[:, None], freqs[None, :])
    expansion = _Windowed(extent, coeffs * scale_window(ell)(tau), freqs)
    return BiradialProfile(
        expansion.evaluate,
        None,
        min(profile.smooth_scale, 2.0 ** (-ell)),
        f"{profile.name}[ell={ell}]",
    )


def aux_nodes(profile: BiradialProfile, points=256, window=None):
    """Non-negative auxiliary grid coordinates used by :func:`radial_scale_piece`."""
    if window is None:
        window = 4.0 * profile.support_radius
    h = window / points
    axis = -window / 2 + h * np.arange(points)
    return axis[axis >= 0]


# --- Fourier-series tensorization ----------------------------------------


class Tensorization:
    """Cosine-series coefficients ``gamma_k(u)`` of ``v -> m0(|u|, |v|)`` on ``[-1, 1]``.

    ``gamma_k(u) = 1/2 int_{-1}^{1} exp(-i pi k v) m0(|u|, |v|) dv``
    ``= int_0^1 cos(pi k v) m0(|u|, v) dv`` (the profile is even in ``v``),
    so ``m0(|u|, |v|) = sum_k gamma_k(u) exp(i pi k v)`` with the period-2
    extension in ``v``.
    """

    def __init__(self, profile: BiradialProfile, k_max, nodes=None):
        self.profile = profile
        self.k_max = int(k_max)
        n_nodes = int(nodes or max(4 * self.k_max, 64))
        self._x, self._w = np.polynomial.legendre.leggauss(n_nodes)

    def _panels(self, u):
        """Nodes and weights in ``v`` on [0, 1], split at the support edge."""
        R = self.profile.support_radius
        u = np.abs(np.asarray(u, dtype=float)).ravel()
        edge = np.sqrt(np.clip(R * R - u * u, 0.0, None)) if R is not None else np.ones_like(u)
        edge = np.clip(edge, 0.0, 1.0)
        x, w = self._x, self._w
        # map [-1,1] to [0, edge] and [edge, 1]
        v1 = 0.5 * edge[:, None] * (x + 1)
        w1 = 0.5 * edge[:, None] * w
        v2 = edge[:, None] + 0.5 * (1 - edge[:, None]) * (x + 1)
        w2 = 0.5 * (1 - edge[:, None]) * w
        return u, np.concatenate([v1, v2], axis=1), np.concatenate([w1, w2], axis=1)

    def coefficients(self, u, ks=None):
        """Array of shape ``(len(u), len(ks))`` with ``gamma_k(u)``."""
        ks = np.arange(-self.k_max, self.k_max + 1) if ks is None else np.asarray(ks)
        u, v, w = self._panels(u)
        vals = self.profile.eval(u[:, None], v) * w
        out = np.empty((len(u), len(ks)))
        for i, k in enumerate(ks):
            out[:, i] = np.sum(vals * np.cos(np.pi * k * v), axis=1)
        return out

    def reconstruct(self, u, v, k_max=None):
        """Truncated series ``sum_{|k| <= k_max} gamma_k(u) exp(i pi k v)`` (real part)."""
        k_max = self.k_max if k_max is None else int(k_max)
        ks = np.arange(0, k_max + 1)
        gam = self.coefficients(u, ks)
        weights = np.where(ks == 0, 1.0, 2.0)
        cos = np.cos(np.pi * np.outer(ks, np.asarray(v, dtype=float)))
        return (gam * weights) @ cos

    def sequence(self):
        """List of ``(k, gamma_k)`` pairs for ``|k| <= k_max``."""
        return [(k, (lambda u, k=k: self.coefficients(np.atleast_1d(u), [k])[:, 0])) for k in range(-self.k_max, self.k_max + 1)]


def tensorize(profile: BiradialProfile, k_max, nodes=None):
    """Expand ``m0(|u|, |v|)`` in a Fourier series in ``v`` of period 2.

    Returns
    -------
    list of (int, callable)
        Pairs ``(k, gamma_k)`` for ``-k_max <= k <= k_max``. Use
        :class:`Tensorization` directly for batched evaluation.

    Raises
    ------
    DomainError
        If the profile is not supported in the unit square.
    """
    check_unit_square(profile)
    return Tensorization(profile, k_max, nodes).sequence()


def check_unit_square(profile: BiradialProfile):
    R = profile.support_radius
    if R is None or R > 1.0 + 1e-12:
        raise DomainError("tensorize needs a profile supported in the unit square")


def fit_decay_exponent(ks, values):
    """Least-squares slope of ``log|values|`` against ``log k`` (returned as a positive decay)."""
    ks = np.asarray(ks, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    keep = values > 0
    slope, _ = np.polyfit(np.log(ks[keep]), np.log(values[keep]), 1)
    return -float(slope)


def annulus_area_quadrant(j, n_nodes=2000):
    """Area of ``{(s, t) >= 0 : chi(2**j (1 - s**2 - t**2)) != 0}`` by polar quadrature."""
    lo, hi = 5.0 / 8.0 * 2.0**-j, 3.0 / 2.0 * 2.0**-j
    r_in = math.sqrt(max(0.0, 1.0 - hi))
    r_out = math.sqrt(max(0.0, 1.0 - lo))
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    r = r_in + (r_out - r_in) * (x + 1) / 2
    return float(np.pi / 2 * np.sum(w * r) * (r_out - r_in) / 2)
