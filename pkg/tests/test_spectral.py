import numpy as np
import pytest

from adm_les import spectral as sp
from adm_les.spectral import SpectralScalarField, SpectralVectorField, TorusSpec


def single_mode(grid, n, amp, comp=None):
    """Hermitian pair at +-n with amplitude ``amp`` (vector if ``comp`` given)."""
    M = grid.n_points
    shape = (M, M, M) if comp is None else (3, M, M, M)
    c = np.zeros(shape, dtype=complex)
    neg = tuple(-v for v in n)
    if comp is None:
        c[grid.index(n)] = amp
        c[grid.index(neg)] = np.conj(amp)
        return SpectralScalarField(grid, c)
    c[(comp,) + grid.index(n)] = amp
    c[(comp,) + grid.index(neg)] = np.conj(amp)
    return SpectralVectorField(grid, c)


def test_torus_validation():
    with pytest.raises(ValueError):
        TorusSpec(0.0, 4)
    with pytest.raises(ValueError):
        TorusSpec(1.0, 1)
    g = TorusSpec(2 * np.pi, 8)
    assert g.cutoff == 5
    assert g.n_points == 18
    # 3 * cutoff + 1 points avoid aliasing of dealiased products
    assert g.product_size >= 3 * g.cutoff + 1


def test_wavevector_euclidean():
    g = TorusSpec(4.0, 4)
    wv = sp.WaveVector.from_index(g, (1, 2, 3))
    expected = (2 * np.pi / 4.0) ** 2 * (1 + 4 + 9)
    assert wv.k2 == pytest.approx(expected, rel=1e-15)
    assert g.k2[g.index((1, 2, 3))] == pytest.approx(expected, rel=1e-15)


def test_single_mode_physical(grid8):
    a = 0.3 - 0.2j
    f = single_mode(grid8, (1, 0, 0), a)
    x = grid8.coordinates()[0]
    expected = 2 * (a * np.exp(1j * x)).real
    np.testing.assert_allclose(sp.to_physical(f), expected, atol=1e-15)


def test_zero_field(grid8):
    z = SpectralVectorField.zeros(grid8)
    assert np.all(sp.to_physical(z) == 0.0)


@pytest.mark.parametrize("size", [None, 40])
def test_round_trip(grid8, rng, size):
    f = sp.random_field(grid8, rng, band=grid8.m)
    back = sp.to_spectral(sp.to_physical(f, size), grid8)
    err = np.max(np.abs(back.coeffs - f.coeffs)) / np.max(np.abs(f.coeffs))
    assert err < 1e-13


def test_leray_projection(grid8, rng):
    f = sp.random_field(grid8, rng, solenoidal=False)
    p = sp.leray_project(f)
    kdot = np.abs(np.einsum("i...,i...->...", grid8.k, p.coeffs))
    norms = np.sqrt(np.sum(np.abs(p.coeffs) ** 2, axis=0))
    mask = norms > 0
    assert np.max(kdot[mask] / norms[mask]) < 1e-14
    np.testing.assert_allclose(sp.leray_project(p).coeffs, p.coeffs, rtol=0, atol=1e-14 * p.max_abs())


def test_leray_kernel_and_range(grid8, rng):
    phi = sp.random_field(grid8, rng, vector=False)
    grad = sp.gradient(phi)
    assert sp.leray_project(grad).max_abs() < 1e-14 * grad.max_abs()
    u = sp.random_field(grid8, rng)
    np.testing.assert_allclose(sp.leray_project(u).coeffs, u.coeffs, atol=1e-15)


def test_dealias_cutoff(grid8):
    assert grid8.cutoff == 5
    c = np.zeros((3,) + (grid8.n_points,) * 3, dtype=complex)
    c[(0,) + grid8.index((6, 0, 0))] = 1.0
    c[(0,) + grid8.index((5, 3, 1))] = 2.0
    d = sp.dealias(SpectralVectorField(grid8, c))
    assert d.coeffs[(0,) + grid8.index((6, 0, 0))] == 0
    assert d.coeffs[(0,) + grid8.index((5, 3, 1))] == 2.0


def test_dealias_idempotent_on_low_band(grid8, rng):
    f = sp.random_field(grid8, rng, band=grid8.cutoff)
    np.testing.assert_array_equal(sp.dealias(f).coeffs, f.coeffs)
    full = sp.random_field(grid8, rng, band=grid8.m)
    above = full - sp.dealias(full)
    assert above.max_abs() > 0
    assert sp.dealias(above).max_abs() == 0.0


def test_sobolev_norm_examples():
    g = TorusSpec(2 * np.pi, 4)
    f = single_mode(g, (2, 0, 0), 1.0, comp=1)
    assert sp.sobolev_norm(f, 1) == pytest.approx(2 * np.sqrt(2), rel=1e-15)
    h = f + single_mode(g, (0, 1, 0), 1.0, comp=2)
    assert sp.sobolev_norm(h, 2) ** 2 == pytest.approx(34.0, rel=1e-14)


def test_parseval(grid8, rng):
    f = sp.random_field(grid8, rng, band=grid8.m)
    mean_sq = np.mean(np.sum(sp.to_physical(f) ** 2, axis=0))
    assert sp.sobolev_norm(f, 0) ** 2 == pytest.approx(mean_sq, rel=1e-12)


def test_hs_inner(grid8, rng):
    f = sp.random_field(grid8, rng)
    g = sp.random_field(grid8, rng)
    assert sp.hs_inner(f, f, 1.5) == pytest.approx(sp.sobolev_norm(f, 1.5) ** 2, rel=1e-14)
    fg, gf = sp.hs_inner(f, g, 1), sp.hs_inner(g, f, 1)
    assert abs(fg - gf) <= 1e-14 * abs(fg)
    a = single_mode(grid8, (1, 0, 0), 1.0, comp=1)
    b = single_mode(grid8, (0, 2, 0), 1.0, comp=0)
    assert sp.hs_inner(a, b, 0) == 0.0
    with pytest.raises(ValueError):
        sp.hs_inner(f, sp.random_field(TorusSpec(2 * np.pi, 4), rng))


def test_derivatives(grid8, rng):
    g = TorusSpec(np.pi, 4)  # |k| = 2 n
    f = single_mode(g, (1, 0, 0), 0.5)
    np.testing.assert_allclose(sp.laplacian(f).coeffs, -4 * f.coeffs, atol=1e-15)
    u = sp.random_field(grid8, rng)
    assert sp.divergence(u).max_abs() < 1e-14 * u.max_abs() * grid8.k_max
    phi = sp.random_field(grid8, rng, vector=False)
    lap = sp.laplacian(phi)
    np.testing.assert_allclose(sp.divergence(sp.gradient(phi)).coeffs, lap.coeffs, atol=1e-14 * lap.max_abs())


def test_operations_preserve_hermitian(grid8, rng):
    f = sp.random_field(grid8, rng, solenoidal=False)
    phi = sp.random_field(grid8, rng, vector=False)
    for out in (sp.leray_project(f), sp.dealias(f), sp.laplacian(f), sp.gradient(phi), sp.divergence(f)):
        assert out.hermitian_defect() < 1e-14 * max(out.max_abs(), 1.0)


def test_norm_band_limited_inequality(grid8, rng):
    f = sp.random_field(grid8, rng)
    K = np.sqrt(np.max(grid8.k2[grid8.dealias_mask]))
    for s, t in ((1, 0), (2, 1), (0.5, -0.5)):
        assert sp.sobolev_norm(f, s) <= sp.sobolev_norm(f, t) * K ** (s - t) * (1 + 1e-14)


def test_fields_are_immutable(grid8):
    z = SpectralVectorField.zeros(grid8)
    with pytest.raises(ValueError):
        z.coeffs[0, 1, 0, 0] = 1.0
    with pytest.raises(ValueError):
        SpectralVectorField(grid8, np.zeros((3, 4, 4, 4)))
