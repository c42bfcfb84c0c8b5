"""Energy balance residual of the ADM under time-step refinement.

The residual is a trapezoid quadrature error, so it should shrink by about
8x per halving of dt when every step is sampled.

    python scripts/energy_balance_study.py --m 8 --dts 0.004,0.002,0.001
"""

import argparse

from adm_les.config import config_from_dict
from adm_les.diagnostics import energy_balance_residual
from adm_les.dynamics import simulate


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--m", type=int, default=16)
    p.add_argument("--N", type=int, default=5)
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--nu", type=float, default=0.05)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--dts", default="0.001,0.0005")
    args = p.parse_args()

    prev = None
    print(f"{'dt':>10} {'residual':>12} {'ratio':>8}")
    for dt in (float(v) for v in args.dts.split(",")):
        cfg = config_from_dict(dict(
            m=args.m, nu=args.nu, alpha=args.alpha, N=args.N, model="adm", dt=dt,
            t_end=args.t_end, init="taylor-green", sample_every=1,
        ))
        _, res = energy_balance_residual(simulate(cfg, keep_samples=False).records)
        ratio = f"{prev / res:8.2f}" if prev else f"{'':>8}"
        print(f"{dt:10.3g} {res:12.4e} {ratio}")
        prev = res


if __name__ == "__main__":
    main()
