"""Parameter sweeps: ADM(N) against the filtered NSE, bound audits, alpha sweep.

Every sweep member is an independent simulation. Members may run in worker
processes; results are always assembled in parameter order, so reports do not
depend on completion order.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from .config import SolverConfig
from .csvio import write_csv
from .dynamics import SimulationAborted, SimulationResult, simulate
from .spectral import _power

AUDIT_ROWS = ("a", "b", "c", "d", "g")
UNIFORM_ROWS = ("a", "b", "c", "d")
AUDIT_LABELS = {
    "a": "sup_t (1/2)||A^(1/2) D_N^(1/2) w||^2",
    "b": "nu int ||grad A^(1/2) D_N^(1/2) w||^2 dt",
    "c": "sup_t ||w||_1",
    "d": "int ||D_N w||_1^2 dt",
    "g": "sup_t ||D_N w||_1",
}


class SweepAborted(RuntimeError):
    def __init__(self, msg, report):
        super().__init__(msg)
        self.report = report


@dataclass
class SweepPoint:
    value: float
    e_l2h1: float
    e_sup_l2: float
    audit: dict = field(default_factory=dict)
    e0_model: float = float("nan")
    wall_time: float = 0.0


@dataclass
class SweepReport:
    axis: str  # "N" or "alpha"
    points: list
    reference: str
    checks: list = field(default_factory=list)  # (name, passed, detail)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def errors(self) -> np.ndarray:
        return np.array([p.e_l2h1 for p in self.points])

    def summary(self) -> str:
        lines = [f"sweep over {self.axis}; reference: {self.reference}"]
        for p in self.points:
            lines.append(
                f"  {self.axis}={p.value:g}  e_L2H1={p.e_l2h1:.6e}  e_supL2={p.e_sup_l2:.6e}  ({p.wall_time:.1f}s)"
            )
        for name, ok, detail in self.checks:
            lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        return "\n".join(lines)


def _h1_sq(c: np.ndarray, k2: np.ndarray) -> float:
    return float(np.sum(k2 * _power(c)))


def _l2_sq(c: np.ndarray, k2: np.ndarray) -> float:
    return float(np.sum(_power(c) * (k2 > 0)))


def _trapz(t, y) -> float:
    t = np.asarray(t)
    y = np.asarray(y)
    return float(np.sum(0.5 * np.diff(t) * (y[1:] + y[:-1])))


def _check_times(run: SimulationResult, ref: SimulationResult):
    ta = np.array([t for t, _ in run.samples])
    tb = np.array([t for t, _ in ref.samples])
    if ta.shape != tb.shape or np.max(np.abs(ta - tb), initial=0.0) > 1e-12 * max(1.0, tb[-1]):
        raise ValueError("run and reference are sampled at different times")
    return ta


def trajectory_errors(run, ref, map_run=None, map_ref=None) -> tuple[float, float]:
    """``(||a - b||_{L2(0,T;H1)}, sup_t ||a - b||_0)`` over shared sample times.

    ``map_run``/``map_ref`` are optional multipliers applied to each sample
    before differencing (e.g. ``D_N`` to compare velocities).
    """
    t = _check_times(run, ref)
    grid = run.samples[0][1].grid
    k2 = grid.k2
    sr = ops.symbol_table(map_run, grid) if map_run is not None else 1.0
    sf = ops.symbol_table(map_ref, grid) if map_ref is not None else 1.0
    h1 = []
    l2 = []
    for (_, a), (_, b) in zip(run.samples, ref.samples):
        d = a.coeffs * sr - b.coeffs * sf
        h1.append(_h1_sq(d, k2))
        l2.append(_l2_sq(d, k2))
    return float(np.sqrt(_trapz(t, h1))), float(np.sqrt(max(l2)))


def audit_run(run: SimulationResult, N: int, alpha: float) -> dict:
    """Rows a-d (uniform in N) and g (may grow with N) for one ADM trajectory."""
    rec = run.records
    t = np.array([r.t for r in rec])
    grid = run.samples[0][1].grid
    D = ops.symbol_table(ops.van_cittert(N, alpha), grid)
    dn_h1_sq = [_h1_sq(w.coeffs * D, grid.k2) for _, w in run.samples]
    ts = [s for s, _ in run.samples]
    return {
        "a": max(r.e_model for r in rec),
        "b": _trapz(t, [r.d_model for r in rec]),
        "c": max(r.h1_w for r in rec),
        "d": _trapz(ts, dn_h1_sq),
        "g": float(np.sqrt(max(dn_h1_sq))),
    }


def _run(cfg: SolverConfig):
    t0 = time.perf_counter()
    try:
        res = simulate(cfg, keep_samples=True)
    except SimulationAborted as e:
        return None, f"{cfg.model} N={cfg.N} alpha={cfg.alpha}: {e}", time.perf_counter() - t0
    return res, None, time.perf_counter() - t0


def _run_all(cfgs, workers: int):
    if workers <= 1 or len(cfgs) <= 1:
        return [_run(c) for c in cfgs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run, cfgs))


def n_sweep(
    config: SolverConfig,
    N_list,
    workers: int = 1,
    uniform_factor: float = 2.0,
    noise: float = 0.01,
    reduction: float | None = 0.01,
    energy_slack: float = 1e-8,
) -> SweepReport:
    """ADM(N) for each N against the filtered NSE at identical discretization.

    Checks added to the report: e_N nonincreasing up to relative ``noise``,
    ``e_{N_max} <= reduction * e_{N_min}`` (skipped when ``reduction`` is None
    or there is a single point), per-run energy bound for unforced runs, and
    ``max/min <= uniform_factor`` on the uniform audit rows.
    """
    N_list = [int(n) for n in N_list]
    ref_cfg = config.with_(model="filtered-nse")
    ref, err, _ = _run(ref_cfg)
    report = SweepReport("N", [], f"filtered-nse m={config.m} nu={config.nu} alpha={config.alpha} dt={config.dt}")
    if ref is None:
        raise SweepAborted(f"reference run aborted: {err}", report)

    results = _run_all([config.with_(model="adm", N=n) for n in N_list], workers)
    for n, (run, err, wall) in zip(N_list, results):
        if run is None:
            raise SweepAborted(err, report)
        e_l2h1, e_sup = trajectory_errors(run, ref)
        report.points.append(
            SweepPoint(n, e_l2h1, e_sup, audit_run(run, n, config.alpha), run.records[0].e_model, wall)
        )
    _n_sweep_checks(report, config, uniform_factor, noise, reduction, energy_slack)
    return report


def _n_sweep_checks(report, config, uniform_factor, noise, reduction, energy_slack):
    pts = report.points
    e = report.errors()
    bad = [i for i in range(1, len(e)) if e[i] > (1.0 + noise) * e[i - 1]]
    report.checks.append(
        ("e_N nonincreasing", not bad, "ok" if not bad else f"increase at N={[pts[i].value for i in bad]}")
    )
    if reduction is not None and len(pts) > 1:
        ratio = e[-1] / e[0] if e[0] > 0 else 0.0
        report.checks.append(
            (f"e_N[{pts[-1].value:g}] <= {reduction:g} e_N[{pts[0].value:g}]", ratio <= reduction, f"ratio {ratio:.3e}")
        )
    if config.forcing.kind == "zero":
        over = [p.value for p in pts if p.audit["a"] > p.e0_model + energy_slack]
        report.checks.append(
            ("model energy <= initial", not over, "ok" if not over else f"exceeded for N={over}")
        )
    for row in UNIFORM_ROWS:
        vals = np.array([p.audit[row] for p in pts])
        ratio = float(vals.max() / vals.min()) if vals.min() > 0 else float("inf")
        report.checks.append((f"row {row} uniform in N", ratio <= uniform_factor, f"max/min {ratio:.4f}"))


def bound_audit(report: SweepReport) -> list:
    """Audit table rows ``(N, a, b, c, d, g)`` from a completed N sweep."""
    return [(p.value,) + tuple(p.audit[r] for r in AUDIT_ROWS) for p in report.points]


def alpha_sweep(config: SolverConfig, alpha_list, N: int | None = None, workers: int = 1) -> SweepReport:
    """ADM(N) at each alpha against plain NSE; errors on ``u = D_N w``. Report only."""
    N = config.N if N is None else int(N)
    ref, err, _ = _run(config.with_(model="plain-nse"))
    report = SweepReport("alpha", [], f"plain-nse m={config.m} nu={config.nu} dt={config.dt}; ADM N={N}")
    if ref is None:
        raise SweepAborted(f"reference run aborted: {err}", report)
    alphas = [float(a) for a in alpha_list]
    results = _run_all([config.with_(model="adm", N=N, alpha=a) for a in alphas], workers)
    for a, (run, err, wall) in zip(alphas, results):
        if run is None:
            raise SweepAborted(err, report)
        e_l2h1, e_sup = trajectory_errors(run, ref, map_run=ops.van_cittert(N, a))
        report.points.append(SweepPoint(a, e_l2h1, e_sup, audit_run(run, N, a), run.records[0].e_model, wall))
    return report


def report_rows(report: SweepReport):
    header = [report.axis, "e_L2H1", "e_supL2"] + [f"audit_{r}" for r in AUDIT_ROWS] + ["e0_model", "wall_time"]
    rows = [
        [p.value, p.e_l2h1, p.e_sup_l2] + [p.audit.get(r, float("nan")) for r in AUDIT_ROWS] + [p.e0_model, p.wall_time]
        for p in report.points
    ]
    return header, rows


def write_report_csv(report: SweepReport, path: str) -> None:
    write_csv(path, *report_rows(report))
