"""Right-hand sides and time stepping for the ADM family on a Fourier-Galerkin space.

The state ``w`` is kept divergence-free, zero-mean, Hermitian and supported on
the 2/3-rule cube. Products are formed on ``grid.product_size`` points, which
makes them exact Galerkin convolutions on that cube.

Model tags:

* ``adm``            w_t + G div(D_N w (x) D_N w) - nu Lap w + grad q = G f
* ``filtered-nse``   same with D_N replaced by A = G^{-1}
* ``plain-nse``      u_t + div(u (x) u) - nu Lap u + grad p = f
* ``linear-stokes``  no advection; filtered forcing; diagnostics as ``adm``
"""

from __future__ import annotations

import functools
import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import fft as sfft

from . import operators as ops
from .spectral import (
    SpectralScalarField,
    SpectralVectorField,
    TorusSpec,
    dealias,
    leray_project,
    _hermitian_full,
    _reflect,
    _transfer,
)

log = logging.getLogger(__name__)

MODELS = ("adm", "filtered-nse", "plain-nse", "linear-stokes")


class CFLViolation(ValueError):
    pass


class SimulationAborted(RuntimeError):
    """Non-finite coefficients; carries the last valid state."""

    def __init__(self, msg, last_state, samples=None, records=None):
        super().__init__(msg)
        self.last_state = last_state
        self.t_last = last_state.t
        self.samples = samples or []
        self.records = records or []


@dataclass(frozen=True)
class ForcingSpec:
    """Body force ``f(t, x) = amplitude(t) * field(x)``.

    ``schedule`` is a tuple of ``(t, amplitude)`` breakpoints interpolated
    linearly (held constant outside); empty means amplitude 1.
    """

    kind: str = "zero"
    field: SpectralVectorField | None = None
    schedule: tuple = ()

    def __post_init__(self):
        if self.kind not in ("zero", "steady", "modulated"):
            raise ValueError(f"unknown forcing kind {self.kind!r}")
        if self.kind != "zero" and self.field is None:
            raise ValueError(f"{self.kind} forcing needs a field")
        if self.field is not None:
            # zero mean is part of the data assumptions
            c = np.array(self.field.coeffs)
            c[:, 0, 0, 0] = 0.0
            object.__setattr__(self, "field", SpectralVectorField(self.field.grid, c))

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"

    def amplitude(self, t: float) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "steady" or not self.schedule:
            return 1.0
        ts, amps = zip(*self.schedule)
        return float(np.interp(t, ts, amps))

    def at(self, t: float) -> SpectralVectorField | None:
        """Unfiltered forcing at time ``t`` (None when zero)."""
        if self.is_zero:
            return None
        return self.field * self.amplitude(t)


@dataclass(frozen=True)
class ModelSpec:
    model: str
    nu: float
    alpha: float
    N: int = 0
    forcing: ForcingSpec = field(default_factory=ForcingSpec)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if not self.nu > 0:
            raise ValueError("nu must be positive")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if int(self.N) != self.N or self.N < 0:
            raise ValueError("N must be a nonnegative integer")

    @property
    def deconv(self) -> ops.FourierMultiplier | None:
        """Operator applied to w inside the quadratic term (None: no advection)."""
        if self.model == "adm":
            return ops.van_cittert(self.N, self.alpha)
        if self.model == "filtered-nse":
            return ops.helmholtz_inverse(self.alpha)
        if self.model == "plain-nse":
            return ops.identity()
        return None

    @property
    def filter(self) -> ops.FourierMultiplier:
        """Averaging applied to the flux and the forcing."""
        if self.model == "plain-nse":
            return ops.identity()
        return ops.helmholtz(self.alpha)

    @property
    def velocity_map(self) -> ops.FourierMultiplier:
        """Map from the state to the velocity of the limit problem (u = A w)."""
        if self.model == "plain-nse":
            return ops.identity()
        return ops.helmholtz_inverse(self.alpha)

    @property
    def energy_multiplier(self) -> ops.FourierMultiplier:
        """E with ``(flux, E w) = 0``; the conserved energy is ``(w, E w)/2``."""
        if self.model == "adm" or self.model == "linear-stokes":
            return ops.compose(ops.helmholtz_inverse(self.alpha), ops.van_cittert(self.N, self.alpha))
        if self.model == "filtered-nse":
            A = ops.helmholtz_inverse(self.alpha)
            return ops.compose(A, A)
        return ops.identity()


@dataclass(frozen=True)
class SimState:
    t: float
    w: SpectralVectorField
    model: ModelSpec

    @property
    def grid(self) -> TorusSpec:
        return self.w.grid


def _advecting_velocity(w: SpectralVectorField, deconv: ops.FourierMultiplier) -> np.ndarray:
    grid = w.grid
    M, P = grid.n_points, grid.product_size
    dw = (w.coeffs * ops.symbol_table(deconv, grid))[..., : M // 2 + 1]
    half = _transfer(dw, M, P, half=True)
    return sfft.irfftn(half, s=(P,) * 3, axes=(-3, -2, -1), norm="forward")


_PAIRS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))


def _flux_from_velocity(u: np.ndarray, grid: TorusSpec, filt: ops.FourierMultiplier) -> np.ndarray:
    """``filt(div(u (x) u))`` coefficients, dealiased, on the storage grid."""
    M, P = grid.n_points, grid.product_size
    prod = np.stack([u[i] * u[j] for i, j in _PAIRS])
    half = _transfer(sfft.rfftn(prod, axes=(-3, -2, -1), norm="forward"), P, M, half=True)
    ik = 1j * grid.k[..., : M // 2 + 1]
    div = np.empty((3,) + half.shape[1:], dtype=np.complex128)
    # symmetric tensor: T[i][j] is the index into _PAIRS
    T = ((0, 1, 2), (1, 3, 4), (2, 4, 5))
    for i in range(3):
        div[i] = ik[0] * half[T[i][0]] + ik[1] * half[T[i][1]] + ik[2] * half[T[i][2]]
    return _hermitian_full(div, M) * (ops.symbol_table(filt, grid) * grid.dealias_mask)


def nonlinear_flux(
    w: SpectralVectorField,
    deconv: ops.FourierMultiplier,
    filt: ops.FourierMultiplier | None = None,
) -> SpectralVectorField:
    """``G div(D w (x) D w)`` with D = ``deconv`` and G = ``filt``.

    ``filt`` defaults to the Helmholtz filter at ``deconv.alpha``. The product
    is computed pseudo-spectrally and the result is truncated to the
    dealiased cube.
    """
    if filt is None:
        filt = ops.helmholtz(deconv.alpha)
    wd = dealias(w)
    u = _advecting_velocity(wd, deconv)
    return SpectralVectorField(w.grid, _flux_from_velocity(u, w.grid, filt))


def _forcing_term(model: ModelSpec, grid: TorusSpec, t: float) -> np.ndarray | None:
    f = model.forcing.at(t)
    if f is None:
        return None
    return f.coeffs * (ops.symbol_table(model.filter, grid) * grid.dealias_mask)


def _project(c: np.ndarray, grid: TorusSpec) -> np.ndarray:
    khat = grid.k_unit
    out = c - khat * np.einsum("i...,i...->...", khat, c)
    out[:, 0, 0, 0] = 0.0
    return out


def _nonlinear_part(w: np.ndarray, t: float, model: ModelSpec, grid: TorusSpec):
    """Projected ``-flux + filtered forcing`` and the advecting velocity (or None)."""
    deconv = model.deconv
    total = None
    u = None
    if deconv is not None:
        wf = SpectralVectorField(grid, w)
        u = _advecting_velocity(wf, deconv)
        total = -_flux_from_velocity(u, grid, model.filter)
    f = _forcing_term(model, grid, t)
    if f is not None:
        total = f if total is None else total + f
    if total is None:
        return np.zeros_like(w), u
    return _project(total, grid), u


def rhs(state: SimState) -> SpectralVectorField:
    """``P(-flux + G f) + nu Lap w``, the Galerkin time derivative."""
    grid = state.grid
    nl, _ = _nonlinear_part(state.w.coeffs, state.t, state.model, grid)
    return SpectralVectorField(grid, nl - state.model.nu * grid.k2 * state.w.coeffs)


def pressure_from_flux(
    flux: SpectralVectorField, forcing_filtered: SpectralVectorField | None = None
) -> SpectralScalarField:
    """Zero-mean ``q`` with ``P(-F + f_bar) = -F + f_bar - grad q``.

    Taking the divergence gives ``-Lap q = div F - div f_bar``, i.e.
    ``q_hat = (i k.F_hat - i k.f_bar_hat) / |k|^2``.
    """
    grid = flux.grid
    src = flux.coeffs
    if forcing_filtered is not None:
        src = src - forcing_filtered.coeffs
    q = np.einsum("i...,i...->...", 1j * grid.k, src) / grid.k2_safe
    q[0, 0, 0] = 0.0
    return SpectralScalarField(grid, q)


def pressure_solve(
    w: SpectralVectorField,
    deconv: ops.FourierMultiplier,
    forcing: SpectralVectorField | None = None,
    filt: ops.FourierMultiplier | None = None,
) -> SpectralScalarField:
    """Pressure of the momentum equation at state ``w``.

    ``forcing`` is the unfiltered body force; it is filtered (and dealiased)
    with ``filt`` exactly as in :func:`rhs`. See :func:`pressure_from_flux`.
    """
    grid = w.grid
    if filt is None:
        filt = ops.helmholtz(deconv.alpha)
    F = nonlinear_flux(w, deconv, filt)
    fbar = None
    if forcing is not None:
        fbar = SpectralVectorField(grid, forcing.coeffs * (ops.symbol_table(filt, grid) * grid.dealias_mask))
    return pressure_from_flux(F, fbar)


def cfl_limit(u: np.ndarray, grid: TorusSpec, cfl: float) -> float:
    """Largest stable dt for advecting velocity ``u`` (inf when u = 0)."""
    umax = float(np.max(np.sum(np.abs(u), axis=0)))
    dx = grid.L / u.shape[-1]
    return math.inf if umax == 0.0 else cfl * dx / umax


def _clean(c: np.ndarray, grid: TorusSpec) -> np.ndarray:
    c = 0.5 * (c + np.conj(_reflect(c)))
    c = _project(c, grid) * grid.dealias_mask
    return c


@functools.lru_cache(maxsize=16)
def _viscous_factors(grid: TorusSpec, nu: float, dt: float):
    eh = np.exp(-0.5 * dt * nu * grid.k2)
    e1 = np.exp(-dt * nu * grid.k2)
    return eh, e1


def step(state: SimState, dt: float, cfl: float | None = 0.5) -> SimState:
    """One Lawson (integrating-factor) RK4 step.

    The viscous term is integrated exactly through ``exp(-nu |k|^2 t)``;
    the projected advection and forcing are treated by classical RK4.
    Raises :class:`CFLViolation` when ``dt`` exceeds the advective limit.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    grid = state.grid
    model = state.model
    t = state.t
    w = state.w.coeffs
    eh, e1 = _viscous_factors(grid, model.nu, dt)

    k1, u = _nonlinear_part(w, t, model, grid)
    if cfl is not None and u is not None:
        limit = cfl_limit(u, grid, cfl)
        if dt > limit:
            raise CFLViolation(
                f"dt={dt:.3e} exceeds CFL limit {limit:.3e} at t={t:.6g} "
                f"(cfl={cfl}, max|u|={float(np.max(np.sum(np.abs(u), axis=0))):.3e})"
            )
    k2_, _ = _nonlinear_part(eh * (w + 0.5 * dt * k1), t + 0.5 * dt, model, grid)
    k3, _ = _nonlinear_part(eh * w + 0.5 * dt * k2_, t + 0.5 * dt, model, grid)
    k4, _ = _nonlinear_part(e1 * w + dt * eh * k3, t + dt, model, grid)
    new = e1 * w + (dt / 6.0) * (e1 * k1 + 2.0 * eh * (k2_ + k3) + k4)
    return SimState(t + dt, SpectralVectorField(grid, _clean(new, grid)), model)


@dataclass
class SimulationResult:
    samples: list  # (t, SpectralVectorField)
    records: list  # diagnostics.EnergyRecord
    final: SimState
    wall_time: float = 0.0


def integrate(
    state: SimState,
    dt: float,
    n_steps: int,
    sample_every: int = 1,
    cfl: float | None = 0.5,
    keep_samples: bool = True,
) -> SimulationResult:
    """Advance ``n_steps`` steps, sampling state and energy every ``sample_every``."""
    from .diagnostics import energy_record

    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    t0 = time.perf_counter()
    samples = []
    records = []

    def _sample(s: SimState):
        if keep_samples:
            samples.append((s.t, s.w))
        records.append(energy_record(s))

    t_start = state.t
    _sample(state)
    for i in range(1, n_steps + 1):
        new = step(state, dt, cfl)
        # no accumulated rounding in t
        new = replace(new, t=t_start + i * dt)
        if not np.all(np.isfinite(new.w.coeffs)):
            raise SimulationAborted(
                f"non-finite coefficients at step {i}; last valid t={state.t:.6g}",
                state,
                samples,
                records,
            )
        state = new
        if i % sample_every == 0 or i == n_steps:
            _sample(state)
    return SimulationResult(samples, records, state, time.perf_counter() - t0)


def initial_state(config) -> SimState:
    """Build the model and ``w(0)`` from a :class:`~adm_les.config.SolverConfig`.

    Initial data is Leray-projected and dealiased; the filtered models start
    from ``G u0`` and ``plain-nse`` from ``u0`` itself.
    """
    from . import initial
    from .snapshot import read_snapshot

    grid = TorusSpec(config.L, config.m)
    u0 = initial.from_config(config.init, grid)
    forcing = ForcingSpec()
    fc = config.forcing
    if fc.kind != "zero":
        ff = read_snapshot(fc.path)
        if ff.grid != grid:
            raise ValueError(f"forcing snapshot grid {ff.grid} does not match {grid}")
        if not isinstance(ff, SpectralVectorField):
            raise ValueError("forcing snapshot must have 3 components")
        forcing = ForcingSpec(fc.kind, ff * fc.scale, tuple(tuple(p) for p in fc.schedule))
    model = ModelSpec(config.model, config.nu, config.alpha, config.N, forcing)
    u0 = dealias(leray_project(u0))
    w0 = u0 if config.model == "plain-nse" else ops.apply(model.filter, u0)
    return SimState(0.0, w0, model)


def simulate(config, keep_samples: bool = True) -> SimulationResult:
    """Run a configured simulation from ``t = 0`` to ``config.t_end``."""
    state = initial_state(config)
    log.info("simulate %s N=%d m=%d dt=%g steps=%d", config.model, config.N, config.m, config.dt, config.n_steps)
    return integrate(state, config.dt, config.n_steps, config.sample_every, config.cfl, keep_samples)
