"""Gluing defects for every corpus end profile across dimensions, as CSV.

    python3 scripts/gluing_defects.py --panels 2 4 8
"""

import argparse
import csv
import sys

from qcurv.corpus import corpus
from qcurv.gbc import gluing_invariance


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--panels", type=int, nargs="+", default=[4],
                    help="Gauss-Legendre panels per cutoff band")
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 4, 6, 8])
    args = ap.parse_args(argv)

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["profile", "n", "panels", "defect"])
    for e in corpus():
        for n in args.dims:
            for panels in args.panels:
                out.writerow([e.name, n, panels, f"{gluing_invariance(e.profile, dim=n, panels=panels):.3e}"])


if __name__ == "__main__":
    main()
