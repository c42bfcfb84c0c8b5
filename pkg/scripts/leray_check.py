"""Energy inequality margin for u = A w along filtered NSE runs at several dt.

    python scripts/leray_check.py --m 8 --dts 0.002,0.001
"""

import argparse

import numpy as np

from adm_les.config import config_from_dict
from adm_les.diagnostics import leray_inequality_check
from adm_les.dynamics import simulate


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--m", type=int, default=16)
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--nu", type=float, default=0.05)
    p.add_argument("--t-end", type=float, default=0.5)
    p.add_argument("--dts", default="0.001,0.0005")
    args = p.parse_args()

    print(f"{'dt':>10} {'min margin':>12} {'max|margin|':>12} {'ok':>4}")
    for dt in (float(v) for v in args.dts.split(",")):
        cfg = config_from_dict(dict(
            m=args.m, nu=args.nu, alpha=args.alpha, model="filtered-nse", dt=dt,
            t_end=args.t_end, init="taylor-green", sample_every=1,
        ))
        margin, ok = leray_inequality_check(simulate(cfg, keep_samples=False).records)
        print(f"{dt:10.3g} {margin.min():12.4e} {np.abs(margin).max():12.4e} {str(ok):>4}")


if __name__ == "__main__":
    main()
