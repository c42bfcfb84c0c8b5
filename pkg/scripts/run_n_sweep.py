"""ADM(N) sweep against the filtered NSE reference, with the bound audit table.

    python scripts/run_n_sweep.py scripts/configs/sweep_m8.json
    python scripts/run_n_sweep.py scripts/configs/sweep_m16.json --workers 4
"""

import argparse
import sys
from pathlib import Path

from adm_les.config import load_config
from adm_les.experiments import AUDIT_LABELS, AUDIT_ROWS, bound_audit, n_sweep, write_report_csv


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("config")
    p.add_argument("--n-list", default="0,1,2,4,8,16,32")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="CSV path (default: <output_dir>/sweep_n.csv)")
    args = p.parse_args()

    cfg = load_config(args.config)
    report = n_sweep(cfg, [int(v) for v in args.n_list.split(",")], workers=args.workers)
    print(report.summary())
    print("\naudit (rows a-d should stay flat in N, g may grow):")
    for r in AUDIT_ROWS:
        print(f"  {r}: {AUDIT_LABELS[r]}")
    print("  N    " + "".join(f"{r:>14}" for r in AUDIT_ROWS))
    for row in bound_audit(report):
        print(f"  {row[0]:<4g} " + "".join(f"{v:14.6e}" for v in row[1:]))
    out = Path(args.out or Path(cfg.output_dir) / "sweep_n.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_report_csv(report, str(out))
    print(f"\nwrote {out}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
