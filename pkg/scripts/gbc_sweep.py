"""Total Q-curvature of the w_a family and of seeded random profiles, as CSV.

    python3 scripts/gbc_sweep.py --count 50 --seed 3 > sweep.csv
"""

import argparse
import csv
import sys

import numpy as np

from qcurv.corpus import random_profiles
from qcurv.gbc import verify_gbc_rn
from qcurv.profiles import w_a_profile


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=50, help="random profiles to draw")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, default=4)
    args = ap.parse_args(argv)

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["source", "a", "total", "bound", "verdict", "equality_observed"])
    for a in np.linspace(-1.5, 0.0, 13):
        rep = verify_gbc_rn(w_a_profile(a, args.n), args.n)
        out.writerow(["w_a", f"{a:.3f}", f"{rep.total:.10f}", rep.bound, rep.verdict,
                      rep.equality_observed])
    for p in random_profiles(args.count, args.seed, args.n):
        rep = verify_gbc_rn(p, args.n)
        a = rep.details.get("c1_infinity", float("nan"))
        out.writerow(["random", f"{a:.3f}", f"{rep.total:.10f}", rep.bound, rep.verdict,
                      rep.equality_observed])


if __name__ == "__main__":
    main()
