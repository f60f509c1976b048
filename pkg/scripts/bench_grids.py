"""Palette sizes of the full pipeline on square and rectangular grids."""

import argparse
import csv
import sys
import time

from pcentered import bounds
from pcentered.centered import verify_p_centered
from pcentered.layered import grid_instance
from pcentered.partition import ColoringResult, theorem1_coloring


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sides", type=int, nargs="+", default=[2, 3, 4, 5, 6])
    ap.add_argument("--ps", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("-t", type=int, default=5)
    ap.add_argument("--backend", default="ps19", choices=["ps19", "treedepth", "identity"])
    ap.add_argument("--verify", action="store_true", help="exact check when n <= 16")
    args = ap.parse_args()

    out = csv.writer(sys.stdout, delimiter="\t")
    out.writerow(["rows", "cols", "n", "p", "palette", "parts", "palette_bound", "headline_bound", "verified", "secs"])
    for side in args.sides:
        for rows in sorted({side, max(1, side - 1)}):
            g, lrs = grid_instance(rows, side)
            for p in args.ps:
                start = time.perf_counter()
                res = theorem1_coloring(g, args.t, p, lrs, args.backend, verify=None)
                secs = time.perf_counter() - start
                if not isinstance(res, ColoringResult):
                    out.writerow([rows, side, g.n, p, "certificate", "", "", "", "", f"{secs:.3f}"])
                    continue
                verified = ""
                if args.verify and g.n <= 16:
                    verified = verify_p_centered(g, res.zeta, p).ok
                out.writerow([
                    rows, side, g.n, p, res.palette, len(res.partition.parts),
                    bounds.palette_bound(args.t, lrs.c, p), bounds.headline_bound(args.t, lrs.c, p),
                    verified, f"{secs:.3f}",
                ])


if __name__ == "__main__":
    main()
