"""Uniform periodic grids, the discrete Fourier transform contract, and norms.

Conventions
-----------
Physical points are ``x_j = -L/2 + j h`` with ``h = L/N``; frequencies are
``k / L`` for ``k`` in ``[-N/2, N/2)``. Arrays are stored in centered order
along every axis (index ``N/2`` is the origin). The forward transform
approximates ``int f(x) exp(-2 pi i x.xi) dx`` by the Riemann sum with
weight ``h**n``; the inverse approximates ``int F(xi) exp(2 pi i x.xi) dxi``
with weight ``L**-n``. Parseval then reads
``h**n sum |f|^2 = L**-n sum |F|^2``.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AliasingError, DomainError, SpaceMismatchError

PHYSICAL = "physical"
FREQUENCY = "frequency"
_SPACES = (PHYSICAL, FREQUENCY)

MAGIC = b"BRGRID1"


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on ``[-L/2, L/2)**dim``.

    Parameters
    ----------
    dim : int
        Spatial dimension. Function grids use 1 or 2; symbols live on
        ``2 * dim`` axes; dimension 3 is accepted for point-set geometry.
    points_per_axis : int
        ``N``, a power of two, at least 8.
    extent : float
        Side length ``L``.
    """

    dim: int
    points_per_axis: int
    extent: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3, 4):
            raise DomainError(f"unsupported dimension {self.dim}")
        n = self.points_per_axis
        if int(n) != n or n < 8 or n & (n - 1):
            raise DomainError("points_per_axis must be a power of two >= 8")
        if not (self.extent > 0 and math.isfinite(self.extent)):
            raise DomainError("extent must be positive and finite")

    @property
    def N(self):
        return self.points_per_axis

    @property
    def L(self):
        return self.extent

    @property
    def spacing(self):
        return self.extent / self.points_per_axis

    @property
    def shape(self):
        return (self.points_per_axis,) * self.dim

    @property
    def nyquist(self):
        """Largest frequency magnitude representable on each axis, ``N/(2L)``."""
        return self.points_per_axis / (2.0 * self.extent)

    @property
    def guard_radius(self):
        """Spectral radius below which pointwise products do not alias, ``N/(4L)``."""
        return self.points_per_axis / (4.0 * self.extent)

    def axis(self):
        """Physical coordinates along one axis."""
        return -self.extent / 2 + self.spacing * np.arange(self.points_per_axis)

    def freq_axis(self):
        """Centered frequencies along one axis."""
        N = self.points_per_axis
        return (np.arange(N) - N // 2) / self.extent

    def coords(self):
        """Tuple of broadcastable coordinate arrays (``indexing='ij'``)."""
        return np.meshgrid(*([self.axis()] * self.dim), indexing="ij", sparse=True)

    def freq_coords(self):
        return np.meshgrid(*([self.freq_axis()] * self.dim), indexing="ij", sparse=True)

    def radius(self):
        return np.sqrt(sum(c**2 for c in self.coords()))

    def freq_radius(self):
        return np.sqrt(sum(c**2 for c in self.freq_coords()))

    def refine(self, factor=2):
        """Same window, ``factor`` times more points."""
        return GridSpec(self.dim, self.points_per_axis * factor, self.extent)

    def to_header(self, space):
        return {"dim": self.dim, "n": self.points_per_axis, "extent": self.extent, "space": space}


class GridFunction:
    """Immutable complex samples on a :class:`GridSpec`, tagged by space."""

    __slots__ = ("spec", "samples", "space")

    def __init__(self, spec: GridSpec, samples, space=PHYSICAL):
        if space not in _SPACES:
            raise DomainError(f"unknown space tag {space!r}")
        arr = np.array(samples, dtype=complex)
        if arr.shape != spec.shape:
            arr = arr.reshape(spec.shape)
        arr.flags.writeable = False
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "space", space)

    def __setattr__(self, name, value):
        raise AttributeError("GridFunction is immutable")

    def __repr__(self):
        return f"GridFunction(spec={self.spec!r}, space={self.space!r})"

    def with_samples(self, samples, space=None):
        return GridFunction(self.spec, samples, space or self.space)

    def __add__(self, other):
        _same(self, other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other):
        _same(self, other)
        return self.with_samples(self.samples - other.samples)

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            _same(self, other)
            return self.with_samples(self.samples * other.samples)
        return self.with_samples(self.samples * other)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self.with_samples(self.samples / scalar)

    @property
    def real(self):
        return self.samples.real

    def conj(self):
        return self.with_samples(np.conj(self.samples))


def _same(a: GridFunction, b: GridFunction):
    if a.spec != b.spec or a.space != b.space:
        raise SpaceMismatchError("grid functions live on different grids or spaces")


def _require(f: GridFunction, space):
    if f.space != space:
        raise SpaceMismatchError(f"expected a {space}-space grid function, got {f.space}")


def centered_fft(arr, axes=None):
    """Unscaled DFT of a centered-order array, returned in centered order."""
    axes = tuple(range(arr.ndim)) if axes is None else tuple(axes)
    return np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(arr, axes=axes), axes=axes), axes=axes)


def centered_ifft(arr, axes=None):
    """Inverse of :func:`centered_fft` (carries the ``1/N**k`` factor)."""
    axes = tuple(range(arr.ndim)) if axes is None else tuple(axes)
    return np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(arr, axes=axes), axes=axes), axes=axes)


def dft(f: GridFunction) -> GridFunction:
    """Forward transform, Riemann weight ``h**n``."""
    _require(f, PHYSICAL)
    spec = f.spec
    return GridFunction(spec, centered_fft(f.samples) * spec.spacing**spec.dim, FREQUENCY)


def idft(F: GridFunction) -> GridFunction:
    """Inverse transform, Riemann weight ``L**-n``."""
    _require(F, FREQUENCY)
    spec = F.spec
    return GridFunction(spec, centered_ifft(F.samples) / spec.spacing**spec.dim, PHYSICAL)


def parseval_scale(spec: GridSpec):
    """Factor ``L**-n`` with ``h**n sum|f|^2 = L**-n sum|F|^2``."""
    return spec.extent ** (-spec.dim)


def lp_norm(f, p, spec: GridSpec | None = None):
    """Discrete ``L^p`` (quasi-)norm ``(h**n sum |f|^p)**(1/p)``; max for ``p = inf``.

    ``f`` may be a physical :class:`GridFunction` or a raw array together
    with ``spec``. A frequency-space function is measured with the dual
    cell volume ``L**-n``.
    """
    if isinstance(f, GridFunction):
        spec = f.spec
        cell = spec.spacing**spec.dim if f.space == PHYSICAL else spec.extent ** (-spec.dim)
        values = f.samples
    else:
        if spec is None:
            raise DomainError("raw arrays need a GridSpec")
        cell = spec.spacing ** np.ndim(f)
        values = np.asarray(f)
    p = float(p)
    if not p > 0:
        raise DomainError("p must be positive")
    mag = np.abs(values)
    if math.isinf(p):
        return float(mag.max())
    return float((cell * np.sum(mag**p)) ** (1.0 / p))


def spectral_radius(F: GridFunction, tol=0.0):
    """Largest ``|xi|`` at which ``|F| > tol * max|F|``."""
    _require(F, FREQUENCY)
    mag = np.abs(F.samples)
    peak = mag.max()
    if peak == 0:
        return 0.0
    mask = mag > tol * peak
    return float(F.spec.freq_radius()[mask].max())


def check_guard_band(*functions, tol=1e-12):
    """Raise :class:`AliasingError` if any spectrum reaches past the guard radius.

    Physical functions are transformed first. ``tol`` is relative to each
    spectrum's peak modulus.
    """
    for f in functions:
        F = dft(f) if f.space == PHYSICAL else f
        rad = F.spec.freq_radius()
        mag = np.abs(F.samples)
        outside = mag[rad > F.spec.guard_radius + 1e-12]
        if outside.size and outside.max() > tol * max(mag.max(), 1e-300):
            raise AliasingError(
                f"spectrum exceeds guard radius {F.spec.guard_radius:g}; "
                f"relative mass outside = {outside.max() / mag.max():.3e}"
            )


def project_to_band(f: GridFunction, radius=None) -> GridFunction:
    """Zero every frequency with ``|xi| > radius`` (default: guard radius)."""
    spec = f.spec
    radius = spec.guard_radius if radius is None else radius
    F = dft(f) if f.space == PHYSICAL else f
    cut = F.with_samples(np.where(spec.freq_radius() <= radius + 1e-12, F.samples, 0))
    return idft(cut) if f.space == PHYSICAL else cut


# --- smooth cut-offs -----------------------------------------------------


def smooth_step(u):
    """C-infinity step: 0 for ``u <= 0``, 1 for ``u >= 1``.

    Built from ``e(u) = exp(-1/u)`` as ``e(u) / (e(u) + e(1-u))``.
    """
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1.0 - u, 1.0)), 0.0)
        out = a / (a + b)
    return np.where(u <= 0, 0.0, np.where(u >= 1, 1.0, out))


def plateau(t, inner, outer):
    """Even profile equal to 1 on ``|t| <= inner`` and 0 on ``|t| >= outer``."""
    t = np.abs(np.asarray(t, dtype=float))
    return 1.0 - smooth_step((t - inner) / (outer - inner))


PSI_INNER = 5.0 / 8.0
PSI_OUTER = 3.0 / 4.0


def low_pass_profile(t):
    """``psi0``: 1 on ``|t| <= 5/8``, 0 on ``|t| >= 3/4``."""
    return plateau(t, PSI_INNER, PSI_OUTER)


def make_partition_phi():
    """Dyadic partition-of-unity profile ``phi``.

    ``phi(t) = psi0(t) - psi0(2t)`` is even, smooth, supported in
    ``5/16 <= |t| <= 3/4`` (inside ``1/4 <= |t| <= 1``), and
    ``sum_l phi(2**-l t) = 1`` for every ``t != 0`` because the sum
    telescopes.

    Returns
    -------
    callable
        Vectorized ``phi``.
    """

    def phi(t):
        t = np.asarray(t, dtype=float)
        return low_pass_profile(t) - low_pass_profile(2.0 * t)

    return phi


def make_partition_phi0():
    """Companion of ``phi`` for the low frequencies: ``psi0`` itself.

    ``phi0(t) + sum_{l >= 1} phi(2**-l t) = 1`` for all ``t``.
    """
    return low_pass_profile


def make_annulus_chi():
    """``chi`` with support in ``[1/2, 2]`` and ``chi = 1`` on ``[3/4, 5/4]``.

    ``chi(u) = psi0(u/2) - psi0(u)`` on ``u > 0``; it vanishes for
    ``u <= 5/8`` and ``u >= 3/2``, and ``sum_j chi(2**j u) = 1`` for
    ``0 < u <= 5/4``.
    """

    def chi(u):
        u = np.asarray(u, dtype=float)
        return np.where(u > 0, low_pass_profile(u / 2.0) - low_pass_profile(u), 0.0)

    return chi


def make_bump(spec: GridSpec, inner, outer) -> GridFunction:
    """Smooth radial frequency bump: 1 on ``|xi| <= inner``, 0 on ``|xi| >= outer``.

    Raises
    ------
    DomainError
        Unless ``0 < inner < outer < N/(2L)``.
    """
    if not (0 < inner < outer < spec.nyquist):
        raise DomainError(f"need 0 < inner < outer < {spec.nyquist:g}")
    vals = plateau(spec.freq_radius(), inner, outer)
    return GridFunction(spec, vals, FREQUENCY)


def gaussian(spec: GridSpec, width=1.0, center=None) -> GridFunction:
    """``exp(-pi |x - center|^2 / width^2)`` on the grid."""
    coords = spec.coords()
    center = np.zeros(spec.dim) if center is None else np.asarray(center, dtype=float)
    r2 = sum((c - x0) ** 2 for c, x0 in zip(coords, center))
    return GridFunction(spec, np.exp(-np.pi * r2 / width**2), PHYSICAL)


def random_band_limited(spec: GridSpec, rng, radius=None) -> GridFunction:
    """Random complex function with spectrum inside ``radius`` (default guard)."""
    radius = spec.guard_radius if radius is None else radius
    F = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
    F = np.where(spec.freq_radius() <= radius, F, 0)
    return idft(GridFunction(spec, F, FREQUENCY))


# --- BRGRID1 binary format -----------------------------------------------


def encode_grid(array, header: dict) -> bytes:
    head = json.dumps(header, sort_keys=True).encode("utf-8")
    data = np.ascontiguousarray(array, dtype="<c16").tobytes()
    return MAGIC + struct.pack("<I", len(head)) + head + data


def decode_grid(blob: bytes):
    """Return ``(header, array)`` from BRGRID1 bytes."""
    if blob[: len(MAGIC)] != MAGIC:
        raise DomainError("not a BRGRID1 file")
    pos = len(MAGIC)
    (hlen,) = struct.unpack("<I", blob[pos : pos + 4])
    pos += 4
    header = json.loads(blob[pos : pos + hlen].decode("utf-8"))
    pos += hlen
    dim, n = int(header["dim"]), int(header["n"])
    expected = n**dim * 16
    payload = blob[pos:]
    if len(payload) != expected:
        raise DomainError(f"payload has {len(payload)} bytes, expected {expected}")
    arr = np.frombuffer(payload, dtype="<c16").reshape((n,) * dim).astype(complex)
    return header, arr


def save_grid(path, f: GridFunction):
    Path(path).write_bytes(encode_grid(f.samples, f.spec.to_header(f.space)))


def load_grid(path) -> GridFunction:
    header, arr = decode_grid(Path(path).read_bytes())
    spec = GridSpec(int(header["dim"]), int(header["n"]), float(header["extent"]))
    return GridFunction(spec, arr, header["space"])
