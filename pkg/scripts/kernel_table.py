"""Spherical-mean kernels II, G and L on an offset (r, s) grid, with the
series and quadrature evaluations side by side, as CSV.

    python3 scripts/kernel_table.py --n 6 --grid 12
"""

import argparse
import csv
import sys

from qcurv.kernels import kernel_table, offset_grids


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--grid", type=int, default=12, help="points per axis")
    args = ap.parse_args(argv)

    r, s = offset_grids(args.grid)
    series = kernel_table(args.n, r, s, "series")
    quad = kernel_table(args.n, r, s, "quadrature")
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["r", "s", "II", "G", "L", "II_quad", "G_quad", "L_quad"])
    for a, b in zip(series.rows(), quad.rows()):
        out.writerow([f"{v:.12g}" for v in (*a, *b[2:])])
    print(f"# identity defect (series): {series.identity_defect():.3e}", file=sys.stderr)


if __name__ == "__main__":
    main()
