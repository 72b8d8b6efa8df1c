"""Dyadic majorant against the restricted envelope, past the acceptance window.

For each catalog phase prints the majorant, the envelope over
{lam |f| >= 1} and the bound ratio B lam^(1/h) / ln^m' lam on a decade
grid.  Extending lam shows how slowly the ratio settles for h > 1: the
sublevel corrections are relative O(eps^(1/h')) per shell and there are
about log2(lam) shells.  At large lam the certified sublevel measures
also lose resolution (see ``--depth``).

    python scripts/dyadic_majorant.py --lam-max 1e6 --depth 18
"""

import argparse
import time

import numpy as np

from osc_decay.decay_lab import newton_hm, ratio_trend, theorem_ratio
from osc_decay.integrator import QuadConfig, dyadic_envelope_bound, integrate_envelope
from osc_decay.phase_algebra import parse_amplitude, parse_phase

CATALOG = ["x^2+y^2", "x^2-y^2", "x^2*y^2", "x^3+y^3", "x^4+y^4", "x^2*y+y^4"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam-max", type=float, default=1e5)
    ap.add_argument("--depth", type=int, default=18)
    ap.add_argument("--amplitude", default="bump:0.5")
    ap.add_argument("--no-envelope", action="store_true", help="skip the restricted envelope")
    args = ap.parse_args()
    psi = parse_amplitude(args.amplitude)
    lams = 10.0 ** np.arange(2, int(round(np.log10(args.lam_max))) + 1)
    for phase in CATALOG:
        f = parse_phase(phase)
        h, m = newton_hm(f)
        ratios = []
        print(f"{phase}  h={h} m={m}")
        for lam in lams:
            t0 = time.perf_counter()
            b = dyadic_envelope_bound(f, psi, lam, max_depth=args.depth)
            env = "" if args.no_envelope else (
                f"  envelope {integrate_envelope(f, psi, lam, QuadConfig(rel_tol=1e-4), 1.0, region=('ge', 1.0)).value:.4e}")
            ratios.append(theorem_ratio(lam, b, h, m))
            print(f"  lam={lam:8.0e}  bound {b:.4e}{env}  ratio {ratios[-1]:.4f}  ({time.perf_counter() - t0:.1f}s)")
        for i in range(len(lams) - 2):
            s, _ = ratio_trend(lams[i:i + 3], ratios[i:i + 3])
            print(f"  slope on [{lams[i]:.0e}, {lams[i + 2]:.0e}]: {s:+.3f}")


if __name__ == "__main__":
    main()
