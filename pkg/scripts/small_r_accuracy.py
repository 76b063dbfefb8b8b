"""Curvature of the round sphere near the origin, where quotients by r are delicate.

Prints the worst deviation of R, Q and Delta_g J from their constant values
over radii from 1e-12 to 1.

    python3 scripts/small_r_accuracy.py
"""

import numpy as np

from qcurv.curvature import radial_curvature
from qcurv.profiles import round_sphere_profile


def main():
    r = np.geomspace(1e-12, 1.0, 49)
    print("n  max|R - n(n-1)|  max|Q - Q(1)|  max|lap_g J|")
    for n in (2, 4, 6, 8):
        rc = radial_curvature(round_sphere_profile(n), n, r)
        print(f"{n}  {np.max(np.abs(rc.R - n * (n - 1))):.2e}        "
              f"{np.max(np.abs(rc.Q - rc.Q[-1])):.2e}      {np.max(np.abs(rc.lap_g_J)):.2e}")


if __name__ == "__main__":
    main()
