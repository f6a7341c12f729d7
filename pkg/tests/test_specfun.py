import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from biriesz.errors import DomainError
from biriesz.oracles import bessel_j_quadrature, disc_kernel_1d, sphere_fourier_quadrature
from biriesz.specfun import (
    KernelProfile,
    bessel_j,
    bessel_j_tilde,
    br_kernel,
    br_symbol_mass,
    sphere_area,
    sphere_fourier,
)
from biriesz.fieldgrid import GridSpec
from biriesz.symbols import br_profile, lift_biradial


def test_quadrature_oracle_matches_closed_forms():
    # J_{1/2}(t) = sqrt(2/(pi t)) sin t is elementary
    for t in (0.3, 2.0, 17.0):
        assert bessel_j_quadrature(0.5, t) == pytest.approx(math.sqrt(2 / (math.pi * t)) * math.sin(t), abs=1e-14)
    assert bessel_j_quadrature(0.0, 0.0) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.5, 5.0, 12.0, 20.0, -0.3])
@pytest.mark.parametrize("t", [0.05, 0.9, 7.0, 13.0, 33.0, 60.0, 150.0, 199.0])
def test_bessel_matches_oracle(nu, t):
    ref = bessel_j_quadrature(nu, t)
    assert abs(bessel_j(nu, t) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_bessel_special_values():
    assert bessel_j(0, 0) == 1.0
    assert bessel_j(1, 0) == 0.0
    assert abs(bessel_j(0.5, math.pi)) <= 1e-10
    assert math.isinf(bessel_j(-0.25, 0.0))


def test_bessel_rejects_bad_input():
    with pytest.raises(DomainError):
        bessel_j(-0.6, 1.0)
    with pytest.raises(DomainError):
        bessel_j(30, 1.0)
    with pytest.raises(DomainError):
        bessel_j(1.0, float("nan"))
    with pytest.raises(DomainError):
        bessel_j(1.0, -1.0)


def test_bessel_array_shape_and_scipy_agreement():
    t = np.linspace(0, 120, 2401).reshape(49, 49)
    for nu in (0.0, 1.5, 7.0):
        out = bessel_j(nu, t)
        assert out.shape == t.shape
        np.testing.assert_allclose(out, special.jv(nu, t), atol=1e-12)


@given(st.floats(0.0, 20.0), st.floats(0.01, 200.0))
def test_bessel_continuity_across_regimes(nu, t):
    # no jumps at regime switches: nearby arguments give nearby values
    a, b = bessel_j(nu, t), bessel_j(nu, t + 1e-7)
    assert abs(a - b) <= 1e-6


def test_tilde_limits_and_ratio():
    assert bessel_j_tilde(1, 0) == pytest.approx(0.5, abs=1e-15)
    assert bessel_j_tilde(3, 0) == pytest.approx(1 / (8 * math.gamma(4)), rel=1e-14)
    for t in (0.7, 5.0, 40.0):
        assert bessel_j_tilde(0, t) == pytest.approx(bessel_j(0, t), abs=1e-15)
    assert bessel_j_tilde(2, 10) == pytest.approx(bessel_j(2, 10) / 100, rel=1e-13)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.5, 5.0])
def test_tilde_envelope_bounded(nu):
    t = np.linspace(0, 500, 50001)
    scaled = np.abs(bessel_j_tilde(nu, t)) * (1 + t) ** (nu + 0.5)
    assert np.all(np.isfinite(scaled))
    assert scaled.max() < 5.0 * 2.0**nu


@pytest.mark.parametrize("nu", [0.0, 1.0, 2.5])
def test_tilde_derivative_recurrence(nu):
    t = np.linspace(0.5, 50, 200)
    step = 1e-5
    fd = (bessel_j_tilde(nu, t + step) - bessel_j_tilde(nu, t - step)) / (2 * step)
    rhs = -t * bessel_j_tilde(nu + 1, t)
    # relative to the size of the derivative over the range; pointwise ratios
    # blow up at its zeros, where the finite difference is pure round-off
    assert np.max(np.abs(fd - rhs)) <= 1e-6 * np.abs(rhs).max()


def test_sphere_fourier():
    assert sphere_fourier(2, 0.0) == pytest.approx(2 * math.pi)
    assert sphere_fourier(3, 0.0) == pytest.approx(sphere_area(3))
    for r in (0.3, 1.0, 2.2):
        assert sphere_fourier(2, r) == pytest.approx(2 * math.pi * special.j0(2 * math.pi * r), abs=1e-12)
    assert sphere_fourier(3, 1.0) == pytest.approx(sphere_fourier_quadrature(3, [0.0, 0.0, 1.0]), abs=1e-8)
    assert sphere_fourier(2, 0.7) == pytest.approx(sphere_fourier_quadrature(2, [0.7, 0.0]), abs=1e-8)
    with pytest.raises(DomainError):
        sphere_fourier(1, 0.5)


def test_kernel_origin_is_symbol_mass():
    prof = KernelProfile(2, 1.0)
    # closed form c (2 pi)^2 / (2^2 Gamma(3)) equals the disc mass of 1 - |x|^2
    expected = prof.normalization * (2 * math.pi) ** 2 / (4 * math.gamma(3))
    assert br_kernel(prof, 0.0) == pytest.approx(expected, rel=1e-14)
    assert br_kernel(prof, 0.0) == pytest.approx(math.pi / 2, rel=1e-12)
    assert br_symbol_mass(2, 1.0) == pytest.approx(math.pi / 2, rel=1e-10)


@pytest.mark.parametrize("delta", [0.0, 0.5, 1.0, 2.0])
def test_kernel_normalization_closed_form(delta):
    prof = KernelProfile(2, delta)
    assert prof.normalization == pytest.approx(math.gamma(delta + 1) / math.pi**delta, rel=1e-9)


def test_kernel_origin_against_dft_inversion():
    spec = GridSpec(1, 256, 32.0)
    symbol = lift_biradial(br_profile(1.0, 1.0), spec)
    K = symbol.kernel_samples()
    center = K[128, 128].real
    assert center == pytest.approx(br_kernel(KernelProfile(2, 1.0), 0.0), rel=1e-3)


def test_disc_kernel_against_iterated_integral():
    prof = KernelProfile(2, 0.0)
    for r in (0.25, 0.8, 1.7, 3.3):
        assert br_kernel(prof, r) == pytest.approx(disc_kernel_1d(r), abs=1e-4)


def test_kernel_decay_bound():
    prof = KernelProfile(2, 1.0)
    r = np.linspace(5, 400, 4000)
    assert np.max(np.abs(br_kernel(prof, r)) * r**2.5) < 1.0
