"""Classify W(f, theta) on an (f, theta) grid and write one CSV row per point.

    python3 scripts/werner_phase_diagram.py --out phase.csv --nf 41 --ntheta 33
"""

import argparse
import csv

import numpy as np

from opreal.ornl import werner_thresholds
from opreal.cli import scan_row


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="werner_phase.csv")
    ap.add_argument("--nf", type=int, default=41)
    ap.add_argument("--ntheta", type=int, default=33)
    args = ap.parse_args()

    thetas = np.linspace(0.0, np.pi / 2, args.ntheta)
    fs = np.linspace(0.0, 1.0, args.nf)
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(scan_row(0.1, 0.5)), lineterminator="\n")
        w.writeheader()
        for theta in thetas:
            for f in fs:
                w.writerow(scan_row(float(theta), float(f)))

    print(f"{'theta':>10} {'steering f*':>12} {'Bell f*':>10}")
    for theta in thetas[:: max(1, len(thetas) // 8)]:
        th = werner_thresholds(float(theta))
        print(f"{theta:10.6f} {th.steering:12.9f} {th.bell:10.6f}")
    print(f"wrote {len(thetas) * len(fs)} rows to {args.out}")


if __name__ == "__main__":
    main()
