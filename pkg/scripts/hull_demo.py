#!/usr/bin/env python3
"""Matrix convex hull of a union, end to end: dualize the monicized TV drop
and the free square of radius 1/2, intersect, dualize back, and probe the
hull membership oracle on a small grid of plane points.

Usage: python scripts/hull_demo.py
"""

import time

import numpy as np

from freeconvex.algebra import HermitianTuple, pencil_from_tuple
from freeconvex.corpus import scalar_tuple, tv_monic_lift
from freeconvex.spectra import Spectrahedrop, drop_membership, hull_of_union


def main():
    tv = Spectrahedrop(tv_monic_lift())
    square = Spectrahedrop(pencil_from_tuple(HermitianTuple(
        [np.diag([2.0, -2.0, 0.0, 0.0]), np.diag([0.0, 0.0, 2.0, -2.0])])))
    t0 = time.time()
    hull = hull_of_union([tv, square])
    print(f"hull lift: size {hull.lift.d}, {hull.g} x vars, "
          f"{hull.h} auxiliary vars ({time.time() - t0:.1f} s)")
    print()
    print("   x2: " + "".join(f"{v:+.1f} " for v in np.linspace(-1.2, 1.2, 9)))
    for a in np.linspace(-1.2, 1.2, 9):
        row = []
        for b in np.linspace(-1.2, 1.2, 9):
            res = drop_membership(hull, scalar_tuple(a, b))
            row.append("#" if bool(res) else ".")
        print(f"x1 {a:+.1f}  " + "    ".join(row))
    print()
    print("('#' = inside the hull of TV-screen and square)")


if __name__ == "__main__":
    main()
