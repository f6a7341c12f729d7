import math

import numpy as np
import pytest

from biriesz.analysis import a1_functional, a2_functional
from biriesz.errors import AliasingError, DomainError, SpaceMismatchError
from biriesz.fieldgrid import (
    FREQUENCY,
    GridFunction,
    GridSpec,
    dft,
    gaussian,
    idft,
    lp_norm,
    make_bump,
    random_band_limited,
)
from biriesz.operators import (
    BilinearOp,
    annulus_average,
    apply,
    bochner_riesz,
    bochner_riesz_op,
    halfspace_mask,
    halfspace_symbol,
    halfspace_witness,
    restriction_extension,
    torus_partial_sum,
)
from biriesz.oracles import bilinear_brute_force
from biriesz.specfun import KernelProfile, br_kernel, sphere_fourier
from biriesz.symbols import Symbol, br_profile, lift_biradial


def rel_err(a, b):
    return np.linalg.norm(np.ravel(a - b)) / np.linalg.norm(np.ravel(b))


def random_symbol(spec, rng):
    return Symbol(spec, rng.standard_normal((spec.points_per_axis,) * (2 * spec.dim)), "random")


@pytest.mark.parametrize("n,N,L", [(1, 64, 16.0), (2, 16, 4.0)])
def test_unit_symbol_gives_product(n, N, L, rng):
    spec = GridSpec(n, N, L)
    f, g = random_band_limited(spec, rng), random_band_limited(spec, rng)
    for engine in ("frequency_loop", "kernel_convolution"):
        out = apply(BilinearOp(Symbol.constant(spec, 1.0), engine), f, g, check_aliasing=True)
        assert rel_err(out.samples, (f * g).samples) <= 1e-10


def test_separable_symbol_factorizes(rng):
    spec = GridSpec(1, 32, 8.0)
    m1, m2 = rng.standard_normal(32), rng.standard_normal(32)
    f, g = random_band_limited(spec, rng), random_band_limited(spec, rng)
    out = apply(BilinearOp(Symbol(spec, np.outer(m1, m2))), f, g)
    Tf = idft(dft(f).with_samples(m1 * dft(f).samples))
    Tg = idft(dft(g).with_samples(m2 * dft(g).samples))
    assert rel_err(out.samples, (Tf * Tg).samples) <= 1e-10


def test_frequency_loop_matches_brute_force(rng):
    spec = GridSpec(1, 32, 8.0)
    for _ in range(3):
        sym = random_symbol(spec, rng)
        f, g = random_band_limited(spec, rng), random_band_limited(spec, rng)
        out = apply(BilinearOp(sym), f, g)
        ref = bilinear_brute_force(sym.values, dft(f).samples, dft(g).samples, spec.extent, spec.axis())
        assert rel_err(out.samples, ref) <= 1e-10


@pytest.mark.parametrize("n,N,L", [(1, 32, 8.0), (2, 8, 4.0)])
def test_engines_agree(n, N, L, rng):
    spec = GridSpec(n, N, L)
    for _ in range(10 if n == 1 else 3):
        sym = random_symbol(spec, rng)
        f, g = random_band_limited(spec, rng), random_band_limited(spec, rng)
        a = apply(BilinearOp(sym, "frequency_loop"), f, g)
        b = apply(BilinearOp(sym, "kernel_convolution"), f, g)
        assert rel_err(a.samples, b.samples) <= 1e-6


def test_bilinearity_and_frequency_inputs(rng):
    spec = GridSpec(1, 32, 8.0)
    op = BilinearOp(random_symbol(spec, rng))
    f1, f2, g = (random_band_limited(spec, rng) for _ in range(3))
    lhs = op(f1 * 2.0 + f2, g)
    rhs = op(f1, g) * 2.0 + op(f2, g)
    assert rel_err(lhs.samples, rhs.samples) <= 1e-12
    assert rel_err(op(dft(f1), dft(g)).samples, op(f1, g).samples) <= 1e-14


def test_errors(rng):
    spec = GridSpec(1, 32, 8.0)
    op = BilinearOp(Symbol.constant(spec, 1.0))
    f = random_band_limited(spec, rng)
    with pytest.raises(SpaceMismatchError):
        op(f, random_band_limited(GridSpec(1, 32, 4.0), rng))
    wide = random_band_limited(spec, rng, radius=spec.nyquist)
    with pytest.raises(AliasingError):
        op(wide, f, check_aliasing=True)
    with pytest.raises(DomainError):
        BilinearOp(op.symbol, "fft")


@pytest.mark.parametrize("n,N,L,shift", [(1, 32, 8.0, (5,)), (2, 16, 4.0, (3, -2))])
def test_translation_commutes(n, N, L, shift, rng):
    spec = GridSpec(n, N, L)
    op = BilinearOp(random_symbol(spec, rng))
    f, g = random_band_limited(spec, rng), random_band_limited(spec, rng)
    axes = tuple(range(n))

    def move(u):
        return u.with_samples(np.roll(u.samples, shift, axis=axes))

    out = op(move(f), move(g))
    assert rel_err(out.samples, move(op(f, g)).samples) <= 1e-12


def test_rotation_invariance_at_origin(rng):
    spec = GridSpec(2, 16, 4.0)
    op = BilinearOp(lift_biradial(br_profile(1.0, 1.2), spec))
    f, g = random_band_limited(spec, rng), random_band_limited(spec, rng)
    centre = (8, 8)

    def reflect0(a):  # x_1 -> -x_1 on the centered grid
        return np.roll(a[::-1, :], 1, axis=0)

    base = op(f, g).samples[centre]
    for rot_f, rot_g in [
        (lambda a: a.T, lambda a: a),
        (reflect0, lambda a: a.T),
        (lambda a: reflect0(a.T), reflect0),
    ]:
        val = op(f.with_samples(rot_f(f.samples)), g.with_samples(rot_g(g.samples))).samples[centre]
        assert abs(val - base) <= 1e-12 * abs(base)


@pytest.mark.parametrize("p1,p2,p", [(2, 2, 1), (4, 4, 2), (math.inf, 2, 2)])
def test_a1_bound(p1, p2, p, rng):
    spec = GridSpec(1, 64, 16.0)
    op = bochner_riesz_op(1.5, 1.0, spec)
    A1 = a1_functional(op.symbol)
    for _ in range(5):
        f, g = random_band_limited(spec, rng), random_band_limited(spec, rng)
        lhs = lp_norm(op(f, g), p)
        assert lhs <= 1.05 * A1 * lp_norm(f, p1) * lp_norm(g, p2)


def test_a2_bound(rng):
    for spec, profile in ((GridSpec(1, 64, 16.0), br_profile(0, 1)), (GridSpec(2, 16, 4.0), br_profile(1, 1))):
        op = BilinearOp(lift_biradial(profile, spec, strict=False))
        A2 = a2_functional(op.symbol)
        for _ in range(5):
            f, g = random_band_limited(spec, rng), random_band_limited(spec, rng)
            assert lp_norm(op(f, g), 2) <= 1.05 * A2 * lp_norm(f, 2) * lp_norm(g, 2)


def test_bochner_riesz_large_radius_is_product(rng):
    spec = GridSpec(1, 64, 16.0)
    f, g = random_band_limited(spec, rng, 1.0), random_band_limited(spec, rng, 1.0)
    out = bochner_riesz(1.0, 100.0, f, g)
    assert rel_err(out.samples, (f * g).samples) <= 1e-3


def test_bochner_riesz_bump_matches_kernel_shape():
    spec = GridSpec(1, 128, 16.0)
    delta = 1.0
    h = make_bump(spec, 1.0, 2.0)
    out = bochner_riesz(delta, 1.0, h, h).samples.real
    x = spec.axis()
    ref = br_kernel(KernelProfile(2, delta), math.sqrt(2) * np.abs(x))
    corr = np.dot(out, ref) / (np.linalg.norm(out) * np.linalg.norm(ref))
    assert corr >= 0.999


def test_disc_multiplier_engines_agree(rng):
    spec = GridSpec(1, 32, 8.0)
    f, g = random_band_limited(spec, rng), random_band_limited(spec, rng)
    a = bochner_riesz(0.0, 1.0, f, g)
    b = bochner_riesz(0.0, 1.0, f, g, engine="kernel_convolution")
    assert rel_err(a.samples, b.samples) <= 1e-6


def test_restriction_kills_vanishing_trace():
    # spectrum concentrated near 0.1 e_1, negligible beyond |xi| = 0.6
    spec = GridSpec(2, 64, 32.0)
    X, _ = np.broadcast_arrays(*spec.coords())
    f = gaussian(spec, width=4.0, center=(1.5, -2.0)) * np.exp(2j * np.pi * 0.1 * X)
    out = restriction_extension(0.9, f)
    assert np.abs(out.samples).max() <= 1e-8 * np.abs(f.samples).max()


def test_restriction_is_sphere_transform_convolution():
    spec = GridSpec(2, 64, 16.0)
    f = gaussian(spec, width=1.0, center=(0.3, -0.2))
    out = restriction_extension(1.0, f)
    X, Y = np.broadcast_arrays(*spec.coords())
    h2 = spec.spacing**2
    for idx in [(32, 32), (40, 28), (20, 45)]:
        x = np.array([X[idx], Y[idx]])
        r = np.hypot(x[0] - X, x[1] - Y)
        ref = np.sum(sphere_fourier(2, r) * f.samples) * h2
        assert abs(out.samples[idx] - ref) <= 1e-6 * np.abs(out.samples).max()


def test_restriction_one_dimensional(rng):
    spec = GridSpec(1, 32, 8.0)
    f = random_band_limited(spec, rng)
    F = dft(f).samples
    out = restriction_extension(0.5, f)
    xi = spec.freq_axis()
    x = spec.axis()
    exp = sum(F[np.isclose(xi, s)][0] * np.exp(2j * np.pi * s * x) for s in (0.5, -0.5))
    assert rel_err(out.samples, exp) <= 1e-12
    with pytest.raises(DomainError):
        restriction_extension(spec.nyquist * 2, f)
    with pytest.raises(DomainError):
        restriction_extension(0.0, f)


def test_annulus_projection(rng):
    spec = GridSpec(2, 32, 8.0)
    f = random_band_limited(spec, rng)
    full = annulus_average(0.0, spec.nyquist, f)
    assert rel_err(full.samples, f.samples) <= 1e-12
    once = annulus_average(0.5, 1.0, f)
    twice = annulus_average(0.5, 1.0, once)
    assert rel_err(twice.samples, once.samples) <= 1e-13
    for _ in range(100):
        u = random_band_limited(spec, rng, radius=spec.nyquist)
        assert lp_norm(annulus_average(0.3, 1.1, u), 2) <= lp_norm(u, 2) * (1 + 1e-12)
    with pytest.raises(DomainError):
        annulus_average(1.0, 1.0, f)
    with pytest.raises(DomainError):
        annulus_average(0.0, spec.nyquist + 1, f)


def test_annulus_is_closed():
    spec = GridSpec(1, 16, 4.0)
    F = GridFunction(spec, np.ones(16, dtype=complex), FREQUENCY)
    cut = annulus_average(0.5, 1.0, F).samples
    xi = np.abs(spec.freq_axis())
    np.testing.assert_array_equal(cut != 0, (xi >= 0.5) & (xi <= 1.0))


def test_halfspace_witness_properties(rng):
    spec = GridSpec(2, 16, 4.0)
    v = np.array([1.0, 0.0])
    xi1 = spec.freq_coords()[0]

    def upper(u):
        U = dft(u)
        return idft(U.with_samples(np.where(xi1 > 0, U.samples, 0)))

    f, g = upper(random_band_limited(spec, rng, 0.9)), upper(random_band_limited(spec, rng, 0.9))
    assert rel_err(halfspace_witness(v, "joint", f, g).samples, (f * g).samples) <= 1e-12

    f, g = random_band_limited(spec, rng, 0.9), random_band_limited(spec, rng, 0.9)
    both = halfspace_witness(v, "joint", f, g) + halfspace_witness(-v, "joint", f, g)
    P = dft(f * g)
    row = idft(P.with_samples(np.where(np.abs(xi1) < 1e-12, P.samples, 0)))
    assert rel_err(both.samples, (f * g + row).samples) <= 1e-12

    sym = halfspace_symbol(spec, v, "joint")
    assert rel_err(apply(BilinearOp(sym), f, g).samples, halfspace_witness(v, "joint", f, g).samples) <= 1e-12
    sym2 = halfspace_symbol(spec, v, "second_slot")
    assert rel_err(apply(BilinearOp(sym2), f, g).samples, halfspace_witness(v, "second_slot", f, g).samples) <= 1e-12

    with pytest.raises(DomainError):
        halfspace_mask(spec, [1.0, 1.0])
    with pytest.raises(DomainError):
        halfspace_witness(v, "diagonal", f, g)


def test_torus_single_mode():
    spec = GridSpec(1, 64, 1.0)
    x = spec.axis()
    out = torus_partial_sum(0.0, 10.0, {3: 1.0}, {3: 1.0}, spec)
    np.testing.assert_allclose(out.samples, np.exp(2j * np.pi * 6 * x), atol=1e-12)
    for delta in (1.0, 4.0, 16.0):
        out = torus_partial_sum(delta, 10.0, {3: 1.0}, {3: 1.0}, spec)
        np.testing.assert_allclose(out.samples, (1 - 18 / 100) ** delta * np.exp(2j * np.pi * 6 * x), atol=1e-12)
    assert np.all(torus_partial_sum(0.0, 4.0, {3: 1.0}, {3: 1.0}, spec).samples == 0)
    spec2 = GridSpec(2, 16, 1.0)
    out = torus_partial_sum(0.0, 5.0, {(1, 2): 1.0}, {(1, 2): 1.0}, spec2)
    X, Y = spec2.coords()
    np.testing.assert_allclose(out.samples, np.exp(2j * np.pi * (2 * X + 4 * Y)), atol=1e-12)


def test_torus_matches_apply_on_integer_grid(rng):
    spec = GridSpec(1, 16, 1.0)
    F = {m: complex(*rng.standard_normal(2)) for m in range(-3, 4)}
    G = {k: complex(*rng.standard_normal(2)) for k in range(-3, 4)}
    torus = torus_partial_sum(1.0, 4.0, F, G, spec)
    x = spec.axis()
    f = GridFunction(spec, sum(c * np.exp(2j * np.pi * m * x) for m, c in F.items()))
    g = GridFunction(spec, sum(c * np.exp(2j * np.pi * k * x) for k, c in G.items()))
    out = bochner_riesz(1.0, 4.0, f, g)
    assert rel_err(out.samples, torus.samples) <= 1e-12
