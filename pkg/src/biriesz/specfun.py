"""Bessel functions of real order and the radial kernels built from them.

Three evaluation regimes cover the supported orders ``nu`` in
``[NU_MIN, NU_MAX]``:

* a power series for small arguments,
* Miller's backward recurrence normalized by the Neumann sum
  ``(t/2)**nu = sum_k c_k J_{nu+2k}(t)`` for moderate arguments,
* the Hankel asymptotic expansion, truncated adaptively at its smallest
  term, for large arguments.

All functions accept scalars or arrays and return the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import DomainError

NU_MIN = -0.49
NU_MAX = 25.0

_SERIES_MAX_T = 12.0
_ASYMPTOTIC_MIN_T = 35.0
_EPS = np.finfo(float).eps


def _check_order(nu):
    nu = float(nu)
    if not math.isfinite(nu) or nu < NU_MIN or nu > NU_MAX:
        raise DomainError(f"order nu={nu} outside supported range [{NU_MIN}, {NU_MAX}]")
    return nu


def _check_argument(t):
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument t must be finite")
    if np.any(arr < 0):
        raise DomainError("argument t must be non-negative")
    return arr


def _series_reduced(nu, t):
    """sum_k (-1)^k (t/2)^{2k} / (k! Gamma(k+nu+1)), i.e. J_nu(t) / (t/2)^nu."""
    q = -(0.5 * t) ** 2
    term = np.full_like(t, 1.0 / special.gamma(nu + 1.0))
    total = term.copy()
    k = 1
    while True:
        term = term * q / (k * (k + nu))
        total += term
        if np.all(np.abs(term) <= 1e-18 * np.maximum(np.abs(total), 1e-300)) or k > 400:
            break
        k += 1
    return total


def _miller(nu, t):
    """Backward recurrence for J_nu on an array of moderate arguments."""
    # start index per element; the extra margin keeps the truncation below 1e-16
    start = 2 * np.ceil((t + 30.0 + 8.0 * np.cbrt(t)) / 2.0).astype(int)
    top = int(start.max())
    upper = np.zeros_like(t)  # J_{nu+k+1}
    current = np.zeros_like(t)  # J_{nu+k}
    norm = np.zeros_like(t)
    value = np.zeros_like(t)
    for k in range(top, -1, -1):
        current = np.where(start == k, 1e-30, current)
        if k % 2 == 0:
            m = k // 2
            if m == 0:
                coef = special.gamma(nu + 1.0)
            else:
                coef = (nu + 2 * m) * math.exp(special.gammaln(nu + m) - special.gammaln(m + 1))
            norm = norm + coef * current
        if k == 0:
            value = current
            break
        order = nu + k
        lower = (2.0 * order / t) * current - upper
        upper, current = current, lower
        big = np.abs(current) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            upper, current, norm = upper * scale, current * scale, norm * scale
    return (0.5 * t) ** nu * value / norm


def _hankel(nu, t):
    """Hankel expansion, summed up to the smallest term."""
    mu = 4.0 * nu * nu
    p = np.ones_like(t)
    q = np.zeros_like(t)
    term = np.ones_like(t)
    active = np.ones(t.shape, dtype=bool)
    prev = np.full_like(t, np.inf)
    for k in range(1, 120):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * t)
        size = np.abs(term)
        active &= size < prev
        if not np.any(active):
            break
        contrib = np.where(active, term, 0.0)
        # a_k/t^k enters P with sign (-1)^{k/2} for even k, Q with (-1)^{(k-1)/2}
        if k % 2 == 0:
            p += contrib * (-1) ** (k // 2)
        else:
            q += contrib * (-1) ** ((k - 1) // 2)
        prev = np.where(active, size, prev)
        active &= size > 1e-17 * np.abs(p)
    chi = t - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * t)) * (p * np.cos(chi) - q * np.sin(chi))


def _asymptotic_threshold(nu):
    return max(_ASYMPTOTIC_MIN_T, 2.0 * nu * nu)


def bessel_j(nu, t):
    """Bessel function of the first kind ``J_nu(t)`` for real ``t >= 0``.

    Parameters
    ----------
    nu : float
        Order, within ``[NU_MIN, NU_MAX]``.
    t : float or array_like
        Non-negative finite argument(s).

    Returns
    -------
    float or ndarray
        ``J_nu(t)``. For ``nu < 0`` the value at ``t = 0`` is ``inf``.

    Raises
    ------
    DomainError
        If the order is unsupported or ``t`` is negative or non-finite.
    """
    nu = _check_order(nu)
    arr = _check_argument(t)
    flat = arr.ravel()
    out = np.empty_like(flat)
    small = flat <= _SERIES_MAX_T
    large = flat >= _asymptotic_threshold(nu)
    middle = ~small & ~large
    if np.any(small):
        ts = flat[small]
        with np.errstate(divide="ignore"):
            pref = np.where(ts > 0, (0.5 * ts) ** nu, 1.0 if nu == 0 else (0.0 if nu > 0 else np.inf))
        out[small] = pref * _series_reduced(nu, ts)
    if np.any(middle):
        out[middle] = _miller(nu, flat[middle])
    if np.any(large):
        out[large] = _hankel(nu, flat[large])
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def bessel_j_tilde(nu, t):
    """Rescaled Bessel function ``J_nu(t) * t**(-nu)``.

    Finite at the origin, where it equals ``1 / (2**nu * Gamma(nu + 1))``.
    It satisfies ``d/dt J~_nu(t) = -t J~_{nu+1}(t)`` and decays like
    ``(1 + t)**(-nu - 1/2)``.
    """
    nu = _check_order(nu)
    arr = _check_argument(t)
    flat = arr.ravel()
    out = np.empty_like(flat)
    small = flat <= _SERIES_MAX_T
    if np.any(small):
        out[small] = 2.0 ** (-nu) * _series_reduced(nu, flat[small])
    if np.any(~small):
        tl = flat[~small]
        out[~small] = bessel_j(nu, tl) * tl ** (-nu)
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def sphere_area(dim):
    """Surface measure of the unit sphere in ``R^dim``."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def sphere_fourier(dim, r):
    """Fourier transform of surface measure on the unit sphere of ``R^dim``.

    ``2 pi r^{-(dim-2)/2} J_{(dim-2)/2}(2 pi r)``, evaluated through the
    rescaled Bessel function so that ``r = 0`` gives the total surface
    measure.
    """
    if int(dim) != dim or dim < 2:
        raise DomainError("sphere_fourier needs dim >= 2")
    nu = (dim - 2) / 2.0
    r = _check_argument(r)
    return 2.0 * math.pi * (2.0 * math.pi) ** nu * bessel_j_tilde(nu, 2.0 * math.pi * r)


def br_symbol_mass(dim, delta):
    """Integral of ``(1 - |zeta|^2)_+^delta`` over ``R^dim`` by radial quadrature."""
    radial, _ = integrate.quad(
        lambda rho: (1.0 - rho * rho) ** delta * rho ** (dim - 1), 0.0, 1.0, epsabs=0, epsrel=1e-13
    )
    return sphere_area(dim) * radial


@dataclass(frozen=True)
class KernelProfile:
    """Radial kernel ``c * J_{delta+dim/2}(2 pi r) / r^{delta+dim/2}``.

    Parameters
    ----------
    dim : int
        Total dimension of the kernel variable (``2n`` for a bilinear kernel
        on ``R^n x R^n``).
    delta : float
        Bochner-Riesz order, ``>= 0``.
    normalization : float, optional
        The constant ``c``. When omitted it is calibrated so that the
        kernel at ``r = 0`` equals the mass of the symbol
        ``(1 - |zeta|^2)_+^delta``, i.e. Fourier inversion at the origin.
    """

    dim: int
    delta: float
    normalization: float | None = field(default=None)

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError("dim must be a positive integer")
        if not (self.delta >= 0):
            raise DomainError("delta must be non-negative")
        _check_order(self.order)
        if self.normalization is None:
            mass = br_symbol_mass(self.dim, self.delta)
            tilde0 = 1.0 / (2.0**self.order * math.gamma(self.order + 1.0))
            c = mass / ((2.0 * math.pi) ** self.order * tilde0)
            object.__setattr__(self, "normalization", c)

    @property
    def order(self):
        return self.delta + self.dim / 2.0

    @property
    def decay_exponent(self):
        """Exponent of the envelope ``r**-(delta + (dim+1)/2)``."""
        return self.delta + (self.dim + 1) / 2.0


def br_kernel(profile: KernelProfile, r):
    """Evaluate the Bochner-Riesz kernel of ``profile`` at radius ``r``."""
    r = _check_argument(r)
    nu = profile.order
    return profile.normalization * (2.0 * math.pi) ** nu * bessel_j_tilde(nu, 2.0 * math.pi * r)
