import math

import numpy as np
import pytest

from biriesz.errors import DomainError, UnderResolvedError
from biriesz.fieldgrid import GridSpec
from biriesz.symbols import (
    BiradialProfile,
    Symbol,
    Tensorization,
    annulus_area_quadrant,
    aux_nodes,
    br_profile,
    compact_spectrum_profile,
    dyadic_spherical,
    fit_decay_exponent,
    lift_biradial,
    radial_scale_piece,
    tensorize,
)


def test_br_profile_values():
    for delta, R in ((0.0, 1.0), (1.0, 1.0), (2.5, 3.0)):
        assert br_profile(delta, R)(0.0, 0.0) == 1.0
    assert br_profile(1, 1)(math.sqrt(0.25), math.sqrt(0.25)) == pytest.approx(0.5)
    disc = br_profile(0, 1)
    assert disc(1.0, 0.0) == 1.0 and disc(0.6, 0.8) == 1.0 and disc(1.0001, 0.0) == 0.0
    s = np.linspace(0, 2, 41)
    vals = br_profile(0.7, 1.3)(s[:, None], s[None, :])
    assert vals.min() >= 0 and vals.max() <= 1
    assert np.all(vals[s[:, None] ** 2 + s[None, :] ** 2 > 1.3**2] == 0)
    with pytest.raises(DomainError):
        br_profile(-0.1)


def test_lift_examples():
    spec = GridSpec(1, 32, 8.0)
    one = BiradialProfile(lambda s, t: np.ones_like(s * t), None, 1.0)
    np.testing.assert_array_equal(lift_biradial(one, spec).values, 1.0)
    disc = lift_biradial(br_profile(0, 1), spec)
    xi = spec.freq_axis()
    np.testing.assert_array_equal(disc.values, (xi[:, None] ** 2 + xi[None, :] ** 2 <= 1).astype(float))


def test_lift_is_radial_in_each_slot():
    spec = GridSpec(2, 16, 4.0)
    m = lift_biradial(br_profile(1.5, 1.5), spec).values
    # reflect xi_1 (index 0 excluded: it has no mirror partner)
    np.testing.assert_array_equal(m[1:, :, :, :], m[1:, :, :, :][::-1, :, :, :])
    # swap the two coordinates of eta
    np.testing.assert_array_equal(m, np.transpose(m, (0, 1, 3, 2)))
    # swap xi and eta
    np.testing.assert_array_equal(m, np.transpose(m, (2, 3, 0, 1)))


def test_lift_rejects_coarse_grid():
    with pytest.raises(UnderResolvedError):
        lift_biradial(dyadic_spherical(1, 4), GridSpec(1, 32, 8.0))
    lift_biradial(dyadic_spherical(1, 4), GridSpec(1, 32, 8.0), strict=False)


def test_dyadic_piece_mid_annulus_and_support():
    for j in range(0, 6):
        piece = dyadic_spherical(0.8, j)
        r_mid = math.sqrt(1 - 2.0**-j)
        assert piece(r_mid, 0.0) == pytest.approx(1.0)
        rad = np.linspace(0, 1, 4001)
        u = 1 - rad**2
        vals = piece(rad, 0.0)
        assert np.all(vals[(u < 2.0 ** (-j - 1)) | (u > 2.0 ** (-j + 1))] == 0)
        assert vals.max() <= 2**0.8


def test_dyadic_pieces_rebuild_br_profile():
    delta, J = 0.75, 14
    rad = np.linspace(0, 1, 3001)
    u = 1 - rad**2
    keep = u > 2.0**-J
    total = sum(dyadic_spherical(delta, j, weighted=True)(rad, 0.0) for j in range(J + 1))
    np.testing.assert_allclose(total[keep], br_profile(delta, 1)(rad, 0.0)[keep], atol=1e-10)


def test_dyadic_annulus_area():
    for j in range(1, 7):
        area = annulus_area_quadrant(j)
        assert area == pytest.approx(math.pi / 4 * 7 / 8 * 2.0**-j, rel=1e-10)
        assert 0.5 < area / (math.pi / 4 * 2.0**-j) < 1.0


def test_dyadic_derivative_scaling():
    # |d/ds m^j| grows like 2^j: the normalized maxima stay within a fixed band
    norms = []
    for j in range(1, 7):
        s = np.linspace(0, 1, 400001)
        vals = dyadic_spherical(1.0, j)(s, 0.0)
        deriv = np.abs(np.diff(vals) / np.diff(s)).max()
        norms.append(deriv / 2.0**j)
    assert max(norms) / min(norms) < 2.0


def test_radial_pieces_reconstruct_profile():
    profile = br_profile(2, 1)
    nodes = aux_nodes(profile)
    s, t = np.meshgrid(nodes, nodes, indexing="ij")
    total = sum(radial_scale_piece(profile, ell)(s, t) for ell in range(13))
    assert np.abs(total - profile(s, t)).max() <= 1e-6


def test_radial_pieces_of_low_frequency_profile():
    profile = compact_spectrum_profile(0.4)
    s = np.linspace(0, 10, 41)
    grid = (s[:, None], s[None, :])
    piece0 = radial_scale_piece(profile, 0, window=64.0)(*grid)
    np.testing.assert_allclose(piece0, profile(*grid), atol=1e-10)
    for ell in (1, 2, 5):
        assert np.abs(radial_scale_piece(profile, ell, window=64.0)(*grid)).max() <= 1e-10


def test_radial_piece_kernel_is_band_limited():
    spec = GridSpec(1, 128, 32.0)
    piece = radial_scale_piece(br_profile(1, 1), 3)
    K = np.abs(lift_biradial(piece, spec, strict=False).kernel_samples()) ** 2
    y = spec.axis()
    inside = (np.abs(y[:, None]) <= 8) & (np.abs(y[None, :]) <= 8)
    assert K[~inside].sum() <= 1e-6 * K.sum()


def test_radial_piece_needs_support_or_window():
    with pytest.raises(DomainError):
        radial_scale_piece(compact_spectrum_profile(1.0), 0)
    with pytest.raises(DomainError):
        radial_scale_piece(br_profile(1, 1), -1)


def test_compact_spectrum_profile_transform_support():
    profile = compact_spectrum_profile(2.0)
    spec = GridSpec(1, 64, 8.0)
    K = np.abs(lift_biradial(profile, spec, strict=False).kernel_samples())
    y = spec.axis()
    outside = (np.abs(y[:, None]) > 2.0) | (np.abs(y[None, :]) > 2.0)
    assert K[outside].sum() <= 1e-6 * K.sum()


def test_tensorization_of_v_independent_profile():
    prof = BiradialProfile(lambda s, t: np.clip(1 - s * s, 0, None) * np.ones_like(t), None, 1.0)
    T = Tensorization(prof, 16)
    u = np.linspace(-1, 1, 21)
    gam = T.coefficients(u, np.arange(-16, 17))
    np.testing.assert_allclose(gam[:, 16], np.clip(1 - u**2, 0, None), atol=1e-12)
    assert np.abs(np.delete(gam, 16, axis=1)).max() <= 1e-10


def test_tensorization_of_br_profile():
    profile = br_profile(1, 1)
    T = Tensorization(profile, 256)
    ks = np.arange(8, 257)
    gam = np.abs(T.coefficients(np.linspace(0, 1, 101), ks)).max(axis=0)
    assert fit_decay_exponent(ks, gam) >= 1.5
    u = np.linspace(-1, 1, 41)
    v = np.linspace(-1, 1, 41)
    approx = Tensorization(profile, 128).reconstruct(u, v)
    assert np.abs(approx - profile(u[:, None], v[None, :])).max() <= 1e-2
    pairs = tensorize(profile, 4)
    assert [k for k, _ in pairs] == list(range(-4, 5))
    k, g = pairs[5]
    assert g(0.3)[0] == pytest.approx(T.coefficients([0.3], [1])[0, 0], rel=1e-12)


def test_tensorize_requires_unit_square():
    with pytest.raises(DomainError):
        tensorize(br_profile(1, 2), 8)
    with pytest.raises(DomainError):
        tensorize(compact_spectrum_profile(1.0), 8)


def test_symbol_io_and_swap(tmp_path, rng):
    spec = GridSpec(1, 16, 4.0)
    vals = rng.standard_normal((16, 16))
    sym = Symbol(spec, vals, "random")
    assert sym.sup_norm == np.abs(vals).max()
    np.testing.assert_array_equal(sym.swapped().values, vals.T)
    path = tmp_path / "sym.brgrid"
    sym.save(path)
    back = Symbol.load(path)
    assert back.spec == spec
    np.testing.assert_array_equal(back.values, vals)
    with pytest.raises(DomainError):
        Symbol(spec, np.ones((16, 8)))
    with pytest.raises(DomainError):
        Symbol(spec, np.full((16, 16), np.nan))
    with pytest.raises(ValueError):
        sym.values[0, 0] = 1.0
