"""Property-based checks over random grids, fields, symbols and configs."""

import json
import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from adm_les import diagnostics as dg
from adm_les import operators as ops
from adm_les import spectral as sp
from adm_les.config import ConfigError, parse_config
from adm_les.dynamics import nonlinear_flux
from adm_les.snapshot import decode, encode
from adm_les.spectral import TorusSpec

alphas = st.floats(min_value=1e-3, max_value=10.0, allow_nan=False)
orders = st.integers(min_value=0, max_value=60)
k2s = st.floats(min_value=0.0, max_value=1e6, allow_nan=False)
seeds = st.integers(min_value=0, max_value=2**32 - 1)
grids = st.builds(
    TorusSpec,
    L=st.floats(min_value=0.5, max_value=20.0, allow_nan=False),
    m=st.integers(min_value=2, max_value=6),
)


@given(alphas, orders, k2s)
def test_symbol_bounds(alpha, N, k2):
    d = ops.deconv_symbol(N, alpha, k2)
    a = alpha**2 * k2
    assert 1.0 - 1e-12 <= d <= (N + 1) * (1 + 1e-12)
    assert d <= (1 + a) * (1 + 1e-12)
    assert ops.deconv_symbol(N + 1, alpha, k2) >= d * (1 - 1e-15)
    s = ops.deconv_symbol_series(N, alpha, k2)
    assert abs(d - s) <= 1e-12 * s


@given(alphas, st.integers(min_value=1, max_value=60), k2s)
def test_yosida_below_A(alpha, N, k2):
    y = ops.yosida_symbol(N, alpha, k2)
    assert 0 < y <= 1 + alpha**2 * k2


@given(alphas, orders, k2s, st.floats(min_value=-3, max_value=3, allow_nan=False))
def test_power_symbol_positive(alpha, N, k2, p):
    v = ops.power_symbol(ops.van_cittert(N, alpha), p).symbol(k2)
    assert np.all(v > 0) and np.all(np.isfinite(v))


@given(grids, seeds)
def test_projection_idempotent_and_hermitian(grid, seed):
    f = sp.random_field(grid, np.random.default_rng(seed), solenoidal=False)
    p = sp.leray_project(f)
    pp = sp.leray_project(p)
    scale = max(p.max_abs(), 1e-300)
    assert np.max(np.abs(pp.coeffs - p.coeffs)) <= 1e-14 * scale
    assert p.hermitian_defect() <= 1e-15 * scale
    assert p.divergence_max() <= 1e-14 * scale * grid.k_max


@given(grids, seeds)
def test_round_trip(grid, seed):
    f = sp.random_field(grid, np.random.default_rng(seed), band=grid.m)
    back = sp.to_spectral(sp.to_physical(f), grid)
    assert np.max(np.abs(back.coeffs - f.coeffs)) <= 1e-13 * f.max_abs()


@given(grids, seeds, st.floats(min_value=-1, max_value=2), st.floats(min_value=0, max_value=2))
def test_sobolev_band_limited(grid, seed, t, ds):
    f = sp.random_field(grid, np.random.default_rng(seed))
    s = t + ds
    K = math.sqrt(np.max(grid.k2[grid.dealias_mask]))
    assert sp.sobolev_norm(f, s) <= sp.sobolev_norm(f, t) * K**ds * (1 + 1e-12)


@given(grids, seeds, alphas, st.integers(min_value=0, max_value=12))
def test_flux_skew_symmetric(grid, seed, alpha, N):
    w = sp.dealias(sp.random_field(grid, np.random.default_rng(seed)))
    D = ops.van_cittert(N, alpha)
    F = nonlinear_flux(w, D)
    Ew = ops.apply(ops.helmholtz_inverse(alpha) @ D, w)
    val = sp.hs_inner(F, Ew, 0)
    # Cauchy-Schwarz scale of the pairing
    assert abs(val) <= 1e-12 * sp.sobolev_norm(F, 0) * sp.sobolev_norm(Ew, 0)


@given(grids, seeds, alphas)
def test_model_energy_monotone_in_N(grid, seed, alpha):
    w = sp.random_field(grid, np.random.default_rng(seed))
    e = [dg.model_energy(w, N, alpha) for N in (0, 1, 3, 9)]
    assert all(b >= a * (1 - 1e-14) for a, b in zip(e, e[1:]))


@given(grids, seeds, st.booleans())
def test_snapshot_round_trip(grid, seed, vector):
    f = sp.random_field(grid, np.random.default_rng(seed), band=grid.m, vector=vector)
    data = encode(f)
    g = decode(data)
    assert type(g) is type(f) and g.grid == grid
    assert np.array_equal(g.coeffs, f.coeffs)
    assert encode(g) == data


json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-5, 40) | st.floats(-2, 2, allow_nan=False) | st.text(max_size=8),
    lambda inner: st.lists(inner, max_size=3) | st.dictionaries(st.text(max_size=6), inner, max_size=3),
    max_leaves=6,
)
base = dict(m=6, nu=0.05, alpha=0.25, model="adm", dt=0.01, t_end=0.1, init="taylor-green")
keys = st.sampled_from(sorted(base) + ["N", "L", "cfl", "sample_every", "forcing", "output_dir", "bogus"])


@given(st.dictionaries(keys, json_values, max_size=4), st.sets(st.sampled_from(sorted(base)), max_size=2))
def test_config_parsing_total(overrides, dropped):
    d = {k: v for k, v in base.items() if k not in dropped}
    d.update(overrides)
    try:
        c = parse_config(json.dumps(d))
    except ConfigError as e:
        assert str(e)
        return
    assert c.m >= 2 and c.alpha > 0 and c.nu > 0 and c.n_steps >= 1
