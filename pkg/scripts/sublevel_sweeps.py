"""Sublevel-set measures of the catalog phases on a log grid in epsilon.

    python scripts/sublevel_sweeps.py --out results/sublevel
"""

import argparse
import math
import os
import time

from osc_decay.cli import sublevel_verdict
from osc_decay.decay_lab import epsilon_sweep, geometric_grid, write_sublevel_csv
from osc_decay.phase_algebra import parse_phase

CATALOG = ["x^2+y^2", "x^2-y^2", "x^2*y^2", "x^3+y^3", "x^4+y^4", "x^2*y+y^4"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/sublevel")
    ap.add_argument("--eps-min", type=float, default=1e-6)
    ap.add_argument("--eps-max", type=float, default=1e-1)
    ap.add_argument("--points", type=int, default=11)
    ap.add_argument("--max-depth", type=int, default=24)
    ap.add_argument("--rel-tol", type=float, default=2e-3)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    grid = geometric_grid(args.eps_min, args.eps_max, args.points)
    for phase in CATALOG:
        t0 = time.perf_counter()
        r = epsilon_sweep(parse_phase(phase), grid, max_depth=args.max_depth, rel_tol=args.rel_tol)
        name = phase.replace("^", "").replace("*", "").replace("+", "p").replace("-", "m") + ".csv"
        with open(os.path.join(args.out, name), "w") as fh:
            write_sublevel_csv(fh, r, {"phase": phase, "delta": r.delta, "m": r.m})
        v = sublevel_verdict(r)
        worst = max(err / v_ for (_, v_), err in zip(r.samples, r.errors))
        print(f"{phase:10s} {r.regime:8s} delta 1/h={float(r.delta):.3f} fitted {r.fitted_delta:.3f}  "
              f"log power {r.fitted_logpow:+.2f} (m={r.m})  {'PASS' if v.passed else 'FAIL'}  "
              f"worst rel error bar {worst:.1e}  ({time.perf_counter() - t0:.0f}s)")
        if phase == "x^2-y^2":
            q = [m / (e * math.log(1 / e)) for e, m in r.samples]
            print(f"{'':10s} measure/(eps ln(1/eps)) in [{min(q):.2f}, {max(q):.2f}]")


if __name__ == "__main__":
    main()
