"""Slow reference computations used to validate the fast code paths.

Nothing here is tuned for speed; each oracle evaluates a defining formula
as directly as possible.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np


def bessel_j_quadrature(nu, t, dps=30):
    """``J_nu(t)`` from its Poisson integral, in extended precision.

    ``J_nu(t) = 2 (t/2)^nu / (Gamma(1/2) Gamma(nu+1/2))
    * int_0^1 (1-u^2)^{nu-1/2} cos(u t) du``, valid for ``nu > -1/2``.
    The integral is taken in ``s = 1 - u`` so the weight
    ``s^{nu-1/2} (2-s)^{nu-1/2}`` is singular only at ``s = 0``. For
    ``nu < 1/2`` the substitution ``s = y^m`` with ``m = 1/(nu+1/2)``
    absorbs ``s^{nu-1/2} ds`` into ``m dy``, leaving a smooth integrand.
    The interval is split so that each piece holds at most a quarter period
    of the cosine; tanh-sinh does the rest.
    """
    if nu <= -0.5:
        raise ValueError("integral representation needs nu > -1/2")
    with mpmath.workdps(dps):
        nu_m = mpmath.mpf(nu)
        t_m = mpmath.mpf(t)
        if t_m == 0:
            return 1.0 if nu == 0 else 0.0
        half = mpmath.mpf(0.5)
        a = nu_m - half
        pieces = max(1, int(math.ceil(float(t) / 4.0)))
        s_nodes = [mpmath.mpf(k) / pieces for k in range(pieces + 1)]
        if a < 0:
            m = 1 / (a + 1)
            integrand = lambda y: m * (2 - y**m) ** a * mpmath.cos((1 - y**m) * t_m)
            nodes = [sn ** (a + 1) for sn in s_nodes]
        else:
            integrand = lambda s: (s * (2 - s)) ** a * mpmath.cos((1 - s) * t_m)
            nodes = s_nodes
        integral = mpmath.quad(integrand, nodes)
        pref = 2 * (t_m / 2) ** nu_m / (mpmath.gamma(half) * mpmath.gamma(nu_m + half))
        return float(pref * integral)


def sphere_fourier_quadrature(dim, x, n_polar=200, n_azimuth=400):
    """``int_{S^{dim-1}} exp(2 pi i x . omega) d omega`` by product quadrature.

    Supports ``dim`` in {2, 3}. For ``dim = 3`` Gauss-Legendre is used in
    ``cos(theta)`` and the trapezoid rule in the azimuth; ``x`` may point in
    any direction.
    """
    x = np.asarray(x, dtype=float)
    if dim == 2:
        phi = 2 * np.pi * np.arange(n_azimuth) / n_azimuth
        omega = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        vals = np.exp(2j * np.pi * omega @ x)
        return float(np.real(vals.sum() * 2 * np.pi / n_azimuth))
    if dim == 3:
        z, wz = np.polynomial.legendre.leggauss(n_polar)
        phi = 2 * np.pi * np.arange(n_azimuth) / n_azimuth
        s = np.sqrt(1 - z * z)
        omega = np.stack(
            [s[:, None] * np.cos(phi)[None, :], s[:, None] * np.sin(phi)[None, :], np.broadcast_to(z[:, None], (n_polar, n_azimuth))],
            axis=-1,
        )
        vals = np.exp(2j * np.pi * omega @ x)
        total = (wz[:, None] * vals).sum() * 2 * np.pi / n_azimuth
        return float(np.real(total))
    raise ValueError("sphere quadrature oracle supports dim 2 and 3")


def disc_kernel_1d(r, n_nodes=4000):
    """Inverse Fourier transform of the unit-disc indicator in ``R^2`` at ``(r, 0)``.

    Integrates over ``xi`` first in closed form: the ``eta`` integral of
    ``exp(2 pi i r eta)`` over ``|eta| <= sqrt(1 - xi^2)`` is
    ``sin(2 pi r w) / (pi r)``. The remaining integral uses Gauss-Legendre
    in ``xi = sin(theta)`` to remove the square-root endpoint.
    """
    theta, w = np.polynomial.legendre.leggauss(n_nodes)
    theta = theta * (np.pi / 2)
    w = w * (np.pi / 2)
    width = np.cos(theta)
    jac = np.cos(theta)
    if r == 0:
        return float(np.sum(w * jac * 2 * width))
    return float(np.sum(w * jac * np.sin(2 * np.pi * r * width) / (np.pi * r)))


def bilinear_brute_force(symbol_values, f_hat, g_hat, extent, x):
    """Direct triple sum ``sum_{xi, eta} e^{2 pi i x(xi+eta)} m f^(xi) g^(eta) / L^2``.

    One-dimensional only. ``symbol_values`` has shape ``(N, N)`` indexed by
    centered frequency indices; ``x`` is the array of physical points.
    """
    N = f_hat.shape[0]
    freqs = (np.arange(N) - N // 2) / extent
    out = np.zeros(len(x), dtype=complex)
    for a, xpt in enumerate(x):
        acc = 0j
        for i in range(N):
            for k in range(N):
                acc += np.exp(2j * np.pi * xpt * (freqs[i] + freqs[k])) * symbol_values[i, k] * f_hat[i] * g_hat[k]
        out[a] = acc / extent**2
    return out
