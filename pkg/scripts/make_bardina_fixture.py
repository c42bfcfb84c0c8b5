"""Regenerate tests/fixtures/bardina_n0.json (N = 0 regression trajectory)."""

import json
from pathlib import Path

from adm_les.config import parse_config
from adm_les.dynamics import initial_state, integrate

PARAMS = dict(m=4, nu=0.05, alpha=0.25, dt=0.01, n_steps=30, sample_every=5)


def main():
    cfg = parse_config(json.dumps(dict(
        m=PARAMS["m"], nu=PARAMS["nu"], alpha=PARAMS["alpha"], N=0, model="adm",
        dt=PARAMS["dt"], t_end=PARAMS["dt"] * PARAMS["n_steps"], init="taylor-green",
    )))
    res = integrate(initial_state(cfg), PARAMS["dt"], PARAMS["n_steps"], PARAMS["sample_every"])
    out = dict(PARAMS, e_model=[r.e_model for r in res.records], h1_w=[r.h1_w for r in res.records])
    path = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "bardina_n0.json"
    path.write_text(json.dumps(out, indent=1) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
