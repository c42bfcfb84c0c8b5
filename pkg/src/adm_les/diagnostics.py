"""Energy functionals and balance checks along trajectories.

For the ADM state ``w`` the conserved-by-advection quantity is
``||A^{1/2} D_N^{1/2} w||^2`` and the exact balance is

    d/dt (1/2)||A^{1/2} D_N^{1/2} w||^2 + nu ||grad A^{1/2} D_N^{1/2} w||^2
        = (A^{-1/2} D_N^{1/2} f, A^{1/2} D_N^{1/2} w).

All quantities are computed from symbols; no physical-space quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from . import operators as ops
from .spectral import SpectralVectorField, _power


@dataclass(frozen=True)
class EnergyRecord:
    t: float
    e_model: float
    d_model: float
    work: float
    e_u: float
    d_u: float
    h1_w: float
    div_max: float
    work_u: float = 0.0  # (f, u) with u the velocity map of w; not a CSV column


CSV_COLUMNS = ("t", "e_model", "d_model", "work", "e_u", "d_u", "h1_w", "div_max", "residual")


def _weighted_sum(c: np.ndarray, weight: np.ndarray) -> float:
    return float(np.sum(weight * _power(c)))


def model_energy(w: SpectralVectorField, N: int, alpha: float) -> float:
    """``(1/2) ||A^{1/2} D_N^{1/2} w||^2``."""
    k2 = w.grid.k2
    sym = (1.0 + alpha**2 * k2) * ops.deconv_symbol(N, alpha, k2)
    return 0.5 * _weighted_sum(w.coeffs, sym * (k2 > 0))


def energy_record(state) -> EnergyRecord:
    """Diagnostics of a :class:`~adm_les.dynamics.SimState` at its time."""
    model = state.model
    w = state.w
    grid = w.grid
    k2 = grid.k2
    nz = k2 > 0
    E = ops.symbol_table(model.energy_multiplier, grid)
    V = ops.symbol_table(model.velocity_map, grid)
    p = _power(w.coeffs) * nz
    e_model = 0.5 * float(np.sum(E * p))
    d_model = model.nu * float(np.sum(k2 * E * p))
    e_u = 0.5 * float(np.sum(V * V * p))
    d_u = model.nu * float(np.sum(k2 * V * V * p))
    h1 = float(np.sqrt(np.sum(k2 * p)))
    work = work_u = 0.0
    f = model.forcing.at(state.t)
    if f is not None:
        F = ops.symbol_table(model.filter, grid) * grid.dealias_mask
        cross = np.sum(f.coeffs * np.conj(w.coeffs), axis=0).real * nz
        work = float(np.sum(F * E * cross))
        work_u = float(np.sum(V * cross))
    return EnergyRecord(state.t, e_model, d_model, work, e_u, d_u, h1, w.divergence_max(), work_u)


def _trapezoid_increments(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    return 0.5 * np.diff(t) * (y[1:] + y[:-1])


def energy_balance_residual(records) -> tuple[np.ndarray, float]:
    """Per-interval residual of the model energy balance.

    ``res_i = dE_i + trapz(d_model) - trapz(work)`` over ``[t_i, t_{i+1}]``.
    Returns the series and ``max|res| / (e_model(0) + 1)``.
    """
    if len(records) < 2:
        raise ValueError("energy balance needs at least 2 records")
    t = np.array([r.t for r in records])
    e = np.array([r.e_model for r in records])
    d = np.array([r.d_model for r in records])
    f = np.array([r.work for r in records])
    res = np.diff(e) + _trapezoid_increments(t, d) - _trapezoid_increments(t, f)
    return res, float(np.max(np.abs(res)) / (e[0] + 1.0))


def leray_margin(records, which: str = "u") -> np.ndarray:
    """Energy-inequality margin at every sample.

    ``which="u"``:  ``[E_u(0) + int (f,u)] - [E_u(t) + int nu||grad u||^2]``
    with ``u = A w``; ``which="model"`` uses the model energy instead, for
    which the margin should vanish up to quadrature error.
    """
    t = np.array([r.t for r in records])
    if which == "u":
        e = np.array([r.e_u for r in records])
        d = np.array([r.d_u for r in records])
        f = np.array([r.work_u for r in records])
    elif which == "model":
        e = np.array([r.e_model for r in records])
        d = np.array([r.d_model for r in records])
        f = np.array([r.work for r in records])
    else:
        raise ValueError(f"which must be 'u' or 'model', got {which!r}")
    cum_d = np.concatenate([[0.0], np.cumsum(_trapezoid_increments(t, d))])
    cum_f = np.concatenate([[0.0], np.cumsum(_trapezoid_increments(t, f))])
    return (e[0] + cum_f) - (e + cum_d)


def leray_inequality_check(records, tol: float | None = None, which: str = "u"):
    """Margin series and whether ``margin >= -tol`` holds everywhere.

    ``tol`` defaults to ``1e-5`` times the initial energy (plus 1e-300).
    """
    margin = leray_margin(records, which)
    if tol is None:
        e0 = records[0].e_u if which == "u" else records[0].e_model
        tol = 1e-5 * e0
    return margin, bool(np.all(margin >= -tol))


def records_to_rows(records):
    """CSV rows in ``CSV_COLUMNS`` order; ``residual`` closes at each row."""
    res = [0.0]
    if len(records) >= 2:
        series, _ = energy_balance_residual(records)
        res.extend(series.tolist())
    return [
        (r.t, r.e_model, r.d_model, r.work, r.e_u, r.d_u, r.h1_w, r.div_max, res[i])
        for i, r in enumerate(records)
    ]


def records_from_rows(rows) -> list[EnergyRecord]:
    """Inverse of :func:`records_to_rows`.

    The CSV has no ``(f, u)`` column, so ``work_u`` is taken equal to
    ``work``; that is exact for filtered-nse, plain-nse and unforced runs.
    """
    names = [f.name for f in fields(EnergyRecord)][:8]
    out = []
    for row in rows:
        vals = dict(zip(names, (float(v) for v in row[:8])))
        out.append(EnergyRecord(**vals, work_u=vals["work"]))
    return out
