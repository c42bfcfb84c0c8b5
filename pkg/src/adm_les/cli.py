"""Command line entry point: ``adm-les <subcommand> ...``.

Every subcommand prints one ``PASS``/``FAIL`` line per check and exits with
status 1 when any check fails (status 2 for unusable input).
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys

import numpy as np

from . import diagnostics as dg
from . import experiments as ex
from . import operators as ops
from .config import ConfigError, check_output_dir, load_config
from .csvio import read_csv, write_csv
from .dynamics import CFLViolation, SimulationAborted, simulate
from .snapshot import write_snapshot
from .spectral import TorusSpec

BALANCE_TOL = 1e-5
LERAY_TOL = 1e-5


class Checks:
    def __init__(self, out=None):
        self.out = out
        self.failed = 0

    def __call__(self, name: str, ok: bool, detail: str = "") -> bool:
        ok = bool(ok)
        self.failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""), file=self.out or sys.stdout)
        return ok

    @property
    def status(self) -> int:
        return 1 if self.failed else 0


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    vals = _float_list(text)
    if any(v != int(v) or v < 0 for v in vals):
        raise argparse.ArgumentTypeError(f"expected comma-separated nonnegative integers, got {text!r}")
    return [int(v) for v in vals]


def _energy_checks(check: Checks, records, model: str, forced: bool):
    if len(records) >= 2:
        _, res = dg.energy_balance_residual(records)
        check("energy balance", res < BALANCE_TOL, f"normalized max residual {res:.3e} (tol {BALANCE_TOL:g})")
    scale = max(r.h1_w for r in records) or 1.0
    div = max(r.div_max for r in records)
    check("divergence-free", div <= 1e-12 * scale, f"max |k.w_k| {div:.3e}")
    if not forced and len(records) >= 2:
        e = np.array([r.e_model for r in records])
        rise = float(np.max(np.diff(e)))
        check("model energy nonincreasing", rise <= 0.0, f"largest increase {rise:.3e}")
    if model in ("filtered-nse", "plain-nse") and len(records) >= 2:
        margin, ok = dg.leray_inequality_check(records, LERAY_TOL * records[0].e_u)
        check("energy inequality for u", ok, f"min margin {float(np.min(margin)):.3e}")


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    out = args.output_dir or cfg.output_dir
    check_output_dir(out)
    check = Checks()
    try:
        res = simulate(cfg, keep_samples=False)
    except CFLViolation as e:
        check("CFL", False, str(e))
        return 1
    except SimulationAborted as e:
        check("finite state", False, str(e))
        if e.records:
            write_csv(os.path.join(out, "energy.csv"), dg.CSV_COLUMNS, dg.records_to_rows(e.records))
        write_snapshot(e.last_state.w, os.path.join(out, "last_valid.admf"))
        return 1
    write_csv(os.path.join(out, "energy.csv"), dg.CSV_COLUMNS, dg.records_to_rows(res.records))
    write_snapshot(res.final.w, os.path.join(out, "final.admf"))
    _energy_checks(check, res.records, cfg.model, cfg.forcing.kind != "zero")
    print(f"wrote {out}/energy.csv and {out}/final.admf ({res.wall_time:.1f}s, {cfg.n_steps} steps)")
    return check.status


def _write_sweep(report, out: str, stem: str):
    write_csv(os.path.join(out, f"{stem}.csv"), *ex.report_rows(report))
    with open(os.path.join(out, f"{stem}_summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(report.summary() + "\n")


def cmd_sweep_n(args) -> int:
    cfg = load_config(args.config)
    out = args.output_dir or cfg.output_dir
    check_output_dir(out)
    check = Checks()
    try:
        report = ex.n_sweep(cfg, args.n_list, workers=args.workers, uniform_factor=args.uniform_factor)
    except ex.SweepAborted as e:
        _write_sweep(e.report, out, "sweep_n")
        check("sweep completed", False, str(e))
        return 1
    _write_sweep(report, out, "sweep_n")
    for p in report.points:
        print(f"N={p.value:g} e_L2H1={p.e_l2h1:.6e} e_supL2={p.e_sup_l2:.6e} g={p.audit['g']:.6e}")
    for name, ok, detail in report.checks:
        check(name, ok, detail)
    return check.status


def cmd_sweep_alpha(args) -> int:
    cfg = load_config(args.config)
    out = args.output_dir or cfg.output_dir
    check_output_dir(out)
    check = Checks()
    try:
        report = ex.alpha_sweep(cfg, args.alpha_list, args.N, workers=args.workers)
    except ex.SweepAborted as e:
        _write_sweep(e.report, out, "sweep_alpha")
        check("sweep completed", False, str(e))
        return 1
    _write_sweep(report, out, "sweep_alpha")
    for p in report.points:
        print(f"alpha={p.value:g} e_L2H1={p.e_l2h1:.6e} e_supL2={p.e_sup_l2:.6e}")
    check("sweep completed", True, f"{len(report.points)} runs (exploratory, no trend asserted)")
    return check.status


def cmd_verify_operators(args) -> int:
    grid = TorusSpec(args.L, args.m)
    k2 = grid.k2[grid.retained_mask]
    check = Checks()
    for name, ok, worst in ops.check_symbol_bounds(k2, [args.alpha], args.n_max):
        check(f"{name} (N<={args.n_max}, alpha={args.alpha:g}, m={args.m})", ok, f"worst {worst:.3e}")

    uniq = np.unique(np.round(k2, 12))
    rho_half = max(float(np.max(np.sqrt(ops.deconv_rho(N, args.alpha, uniq)))) for N in range(args.n_max + 1))
    check("A^(-1/2) D_N^(1/2) symbol <= 1", rho_half <= 1.0, f"max {rho_half:.17g}")

    # Van Cittert converges geometrically, Yosida only like 1/N
    Ns = np.arange(1, args.n_max + 1)
    a = 1.0
    vc = np.array([(1 + a) - ops.deconv_symbol(int(N), 1.0, a) for N in Ns])
    yo = np.array([(1 + a) - ops.yosida_symbol(int(N), 1.0, a) for N in Ns])
    idx = Ns >= 2
    check("Van Cittert gap < Yosida gap (alpha=1, |k|^2=1, N>=2)", bool(np.all(vc[idx] < yo[idx])), "")

    out = args.output_dir
    check_output_dir(out)
    rows = []
    for N in range(args.n_max + 1):
        D = ops.deconv_symbol(N, args.alpha, uniq)
        S = ops.deconv_symbol_series(N, args.alpha, uniq)
        Y = ops.yosida_symbol(N, args.alpha, uniq) if N >= 1 else np.full_like(uniq, math.nan)
        rho = ops.deconv_rho(N, args.alpha, uniq)
        G = ops.helmholtz_symbol(args.alpha, uniq)
        for j in range(len(uniq)):
            rows.append((N, uniq[j], G[j], 1.0 / G[j], D[j], S[j], rho[j], Y[j]))
    path = os.path.join(out, "operator_symbols.csv")
    write_csv(path, ("N", "k2", "G", "A", "D_N", "D_N_series", "rho", "yosida"), rows)
    print(f"wrote {path}")
    return check.status


def cmd_energy_report(args) -> int:
    header, rows = read_csv(args.csv)
    if tuple(header) != dg.CSV_COLUMNS:
        print(f"FAIL columns: expected {','.join(dg.CSV_COLUMNS)}, got {','.join(header)}")
        return 2
    records = dg.records_from_rows(rows)
    check = Checks()
    if len(records) < 2:
        check("energy balance", False, "need at least 2 samples")
        return check.status
    _, res = dg.energy_balance_residual(records)
    check("energy balance", res < args.tol, f"normalized max residual {res:.3e} (tol {args.tol:g})")
    margin = dg.leray_margin(records, "model")
    worst = float(np.max(np.abs(margin)))
    check("model energy equality", worst <= args.tol * (records[0].e_model + 1.0), f"max |margin| {worst:.3e}")
    if args.leray:
        m_u, ok = dg.leray_inequality_check(records, LERAY_TOL * records[0].e_u)
        check("energy inequality for u = A w", ok, f"min margin {float(np.min(m_u)):.3e}")
    return check.status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adm-les", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one configured simulation")
    s.add_argument("config")
    s.add_argument("--output-dir")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep-n", help="ADM(N) sweep against the filtered NSE")
    s.add_argument("config")
    s.add_argument("--n-list", type=_int_list, default=[0, 1, 2, 4, 8, 16, 32])
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--uniform-factor", type=float, default=2.0)
    s.add_argument("--output-dir")
    s.set_defaults(func=cmd_sweep_n)

    s = sub.add_parser("sweep-alpha", help="ADM alpha sweep against plain NSE")
    s.add_argument("config")
    s.add_argument("--alpha-list", type=_float_list, required=True)
    s.add_argument("--N", type=int, default=None, help="deconvolution order (default: config N)")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--output-dir")
    s.set_defaults(func=cmd_sweep_alpha)

    s = sub.add_parser("verify-operators", help="exhaustive symbol bound checks")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--L", type=float, default=2 * math.pi)
    s.add_argument("--output-dir", default="out")
    s.set_defaults(func=cmd_verify_operators)

    s = sub.add_parser("energy-report", help="re-check an energy CSV written by simulate")
    s.add_argument("csv")
    s.add_argument("--tol", type=float, default=BALANCE_TOL)
    s.add_argument("--leray", action="store_true", help="also check the energy inequality for u = A w")
    s.set_defaults(func=cmd_energy_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "verify-operators" and not args.alpha > 0:
            raise ConfigError("alpha", "alpha must be positive")
        return args.func(args)
    except (ConfigError, OSError, ValueError) as e:
        print(f"FAIL input: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
