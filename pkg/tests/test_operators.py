import numpy as np
import pytest

from adm_les import operators as ops
from adm_les import spectral as sp
from adm_les.spectral import TorusSpec, WaveVector


def test_helmholtz_symbol():
    assert ops.helmholtz_symbol(0.7, 0.0) == 1.0
    assert ops.helmholtz_symbol(1.0, 1.0) == 0.5
    assert ops.helmholtz_symbol(0.5, 4.0) == 0.5
    with pytest.raises(ValueError, match="alpha must be positive"):
        ops.helmholtz_symbol(0.0, 1.0)
    wv = WaveVector.from_index(TorusSpec(2 * np.pi, 4), (1, 0, 0))
    assert ops.helmholtz_symbol(1.0, wv) == 0.5


def test_deconv_symbol_examples():
    assert ops.deconv_symbol(0, 0.3, 17.0) == 1.0
    assert ops.deconv_symbol(7, 0.3, 0.0) == 1.0
    assert ops.deconv_symbol(1, 1.0, 1.0) == pytest.approx(1.5, rel=1e-15)
    # series oracle 1 + 1/2 + 1/4
    assert ops.deconv_symbol_series(2, 1.0, 1.0) == pytest.approx(1.75, rel=1e-15)
    assert ops.deconv_symbol_series(0, 1.0, 5.0) == 1.0


def test_closed_form_matches_series_on_grid():
    g = TorusSpec(2 * np.pi, 8)  # 17^3 retained points, covers a 16^3 grid
    k2 = g.k2[g.retained_mask]
    for alpha in (0.1, 1.0, 3.0):
        for N in range(51):
            d = ops.deconv_symbol(N, alpha, k2)
            s = ops.deconv_symbol_series(N, alpha, k2)
            assert np.max(np.abs(d - s) / s) <= 1e-12


def test_large_N_no_overflow():
    k2 = np.array([0.0, 1e-8, 1.0, 1e6])
    d = ops.deconv_symbol(10_000, 1.0, k2)
    assert np.all(np.isfinite(d))
    assert d[0] == 1.0
    np.testing.assert_allclose(d, ops.deconv_symbol_series(10_000, 1.0, k2), rtol=1e-10)
    assert np.all(d <= 10_001)


def test_yosida():
    assert ops.yosida_symbol(3, 1.0, 0.0) == pytest.approx(0.75)
    assert ops.yosida_symbol(1, 1.0, 1.0) == pytest.approx(2 / 3, rel=1e-15)
    with pytest.raises(ValueError):
        ops.yosida_symbol(0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ops.yosida(0, 1.0)


def test_van_cittert_beats_yosida():
    # at alpha = 1, |k|^2 = 1: VC gap 2 (1/2)^(N+1), Yosida gap 2 * 2 / (N + 2)
    for N in range(1, 51):
        vc = 2.0 - ops.deconv_symbol(N, 1.0, 1.0)
        yo = 2.0 - ops.yosida_symbol(N, 1.0, 1.0)
        assert vc == pytest.approx(2 * 0.5 ** (N + 1), rel=1e-10)
        assert yo == pytest.approx(4.0 / (N + 2), rel=1e-12)
        if N >= 2:
            assert vc < yo


def test_power_symbol():
    A = ops.helmholtz_inverse(1.0)
    assert ops.power_symbol(A, 0.5).symbol(3.0) == pytest.approx(2.0, rel=1e-15)
    G = ops.helmholtz(0.4)
    assert ops.power_symbol(G, 1) is G
    assert ops.power_symbol(G, 0).kind is ops.Kind.IDENTITY
    k2 = np.linspace(0, 50, 101)
    np.testing.assert_allclose(ops.power_symbol(G, -1).symbol(k2), ops.helmholtz_inverse(0.4).symbol(k2), rtol=1e-14)


def test_rho_half_bounded():
    k2 = np.linspace(0, 400, 2001)
    for alpha in (0.1, 1.0):
        for N in (0, 1, 5, 50):
            m = ops.compose(
                ops.power_symbol(ops.helmholtz_inverse(alpha), -0.5), ops.power_symbol(ops.van_cittert(N, alpha), 0.5)
            )
            s = m.symbol(k2)
            np.testing.assert_allclose(s, np.sqrt(ops.deconv_rho(N, alpha, k2)), rtol=1e-14)
            assert np.all(s <= 1.0 + 1e-15)
            # A^(1/2) D_N^(1/2) never vanishes
            top = ops.compose(
                ops.power_symbol(ops.helmholtz_inverse(alpha), 0.5), ops.power_symbol(ops.van_cittert(N, alpha), 0.5)
            )
            assert np.all(top.symbol(k2) > 0)


def test_apply(grid8, rng):
    f = sp.random_field(grid8, rng)
    np.testing.assert_array_equal(ops.apply(ops.identity(), f).coeffs, f.coeffs)
    A, G = ops.helmholtz_inverse(0.3), ops.helmholtz(0.3)
    np.testing.assert_allclose(ops.apply(A, ops.apply(G, f)).coeffs, f.coeffs, rtol=1e-13, atol=1e-16)
    D = ops.van_cittert(4, 0.3)
    for i in range(3):
        left = ops.apply(D, sp.partial(f, i)).coeffs
        right = sp.partial(ops.apply(D, f), i).coeffs
        np.testing.assert_allclose(left, right, rtol=0, atol=1e-14 * np.max(np.abs(left)))
    out = ops.apply(D, f)
    assert out.divergence_max() < 1e-13 * out.max_abs()
    assert out.hermitian_defect() == 0.0


def test_cached_table_equals_lazy(grid8, rng):
    f = sp.random_field(grid8, rng)
    for mult in (ops.van_cittert(3, 0.2), ops.yosida(2, 0.5), ops.helmholtz(1.0) @ ops.helmholtz_inverse(0.5)):
        np.testing.assert_array_equal(ops.apply(mult, f).coeffs, ops.apply(mult, f, cached=False).coeffs)
    t = ops.symbol_table(ops.helmholtz(1.0), grid8)
    with pytest.raises(ValueError):
        t[0, 0, 0] = 2.0


def test_operator_gap_single_mode():
    g = TorusSpec(2 * np.pi, 4)
    c = np.zeros((3,) + (g.n_points,) * 3, dtype=complex)
    c[(1,) + g.index((1, 0, 0))] = 1.0
    c[(1,) + g.index((-1, 0, 0))] = 1.0
    f = sp.SpectralVectorField(g, c)
    gap = ops.operator_gap(1, 1.0, f, 0)
    # per-mode factor 2 (1/2)^2 = 0.5 on two unit modes
    assert gap == pytest.approx(0.5 * np.sqrt(2), rel=1e-14)
    direct = ops.apply(ops.helmholtz_inverse(1.0), f) - ops.apply(ops.van_cittert(1, 1.0), f)
    assert gap == pytest.approx(sp.sobolev_norm(direct, 0), rel=1e-14)
    assert ops.operator_gap(3, 1.0, sp.SpectralVectorField.zeros(g), 1) == 0.0


def test_lemma_bounds_on_fields(grid8, rng):
    f = sp.random_field(grid8, rng)
    for N in (0, 2, 9):
        for s in (0, 1):
            D = ops.van_cittert(N, 0.5)
            nd = sp.sobolev_norm(ops.apply(D, f), s)
            assert sp.sobolev_norm(f, s) <= nd * (1 + 1e-14)
            assert nd <= (N + 1) * sp.sobolev_norm(f, s) * (1 + 1e-14)
            half = ops.compose(ops.power_symbol(ops.helmholtz_inverse(0.5), 0.5), ops.power_symbol(D, 0.5))
            assert nd <= sp.sobolev_norm(ops.apply(half, f), s) * (1 + 1e-14)


def test_plateau_at_top_wavevector():
    # D_N(k_max) approaches N + 1 as resolution grows
    N, alpha = 3, 1.0
    vals = [ops.deconv_symbol(N, alpha, TorusSpec(2 * np.pi, m).k_max ** 2) for m in (4, 16, 64, 256)]
    gaps = [(N + 1) - v for v in vals]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3


def test_check_symbol_bounds_report():
    res = ops.check_symbol_bounds(np.linspace(0, 100, 50), [0.5, 2.0], 10)
    assert len(res) == 5
    assert all(ok for _, ok, _ in res)
    # a negative slack turns exact equalities into reported failures
    strict = dict((name, ok) for name, ok, _ in ops.check_symbol_bounds(np.array([0.0, 1.0]), [1.0], 2, slack=-1e-3))
    assert not strict["1 <= D_N"]
