from __future__ import annotations

import numpy as np

from .spectral import SpectralVectorField, TorusSpec, leray_project, sobolev_norm, to_spectral

TG_ENERGY = 0.125  # (1/2) mean |u|^2 of the Taylor-Green field


def taylor_green_init(grid: TorusSpec) -> SpectralVectorField:
    """(sin x cos y cos z, -cos x sin y cos z, 0) with x scaled by 2 pi / L."""
    x, y, z = grid.coordinates() * (2.0 * np.pi / grid.L)
    u = np.stack([
        np.sin(x) * np.cos(y) * np.cos(z),
        -np.cos(x) * np.sin(y) * np.cos(z),
        np.zeros_like(x),
    ])
    return leray_project(to_spectral(u, grid).symmetrized())


def random_init(grid: TorusSpec, seed: int = 0, band=None, energy: float = TG_ENERGY) -> SpectralVectorField:
    """Seeded solenoidal field on the shell ``band[0] <= |k| <= band[1]``.

    Without a band every dealiased mode is populated. Amplitudes decay as
    ``|k|^-2`` and the result is scaled to ``(1/2)||u||^2 = energy``.
    """
    rng = np.random.default_rng(seed)
    M = grid.n_points
    c = rng.standard_normal((3, M, M, M)) + 1j * rng.standard_normal((3, M, M, M))
    kmag = np.sqrt(grid.k2)
    mask = grid.dealias_mask & (grid.k2 > 0)
    if band is not None:
        mask = mask & (kmag >= band[0]) & (kmag <= band[1])
    if not np.any(mask):
        raise ValueError(f"band {band} contains no dealiased modes")
    c = c * mask / np.where(mask, grid.k2, 1.0)
    u = leray_project(SpectralVectorField(grid, c).symmetrized())
    e = 0.5 * sobolev_norm(u, 0.0) ** 2
    if e == 0.0:
        raise ValueError("random field vanished after projection")
    return u * np.sqrt(energy / e)


def from_config(init, grid: TorusSpec) -> SpectralVectorField:
    """Initial velocity for an :class:`~adm_les.config.InitSpec`."""
    if init.kind == "taylor-green":
        return taylor_green_init(grid)
    if init.kind == "random":
        return random_init(grid, init.seed, init.band)
    if init.kind == "snapshot":
        from .snapshot import read_snapshot

        f = read_snapshot(init.path)
        if not isinstance(f, SpectralVectorField):
            raise ValueError(f"{init.path}: initial snapshot must have 3 components")
        if f.grid != grid:
            raise ValueError(f"{init.path}: snapshot grid {f.grid} does not match {grid}")
        return f.symmetrized()
    raise ValueError(f"unknown init kind {init.kind!r}")
