"""Search the template angle that maximizes the violation margin, then compare optimized Bell values."""

import argparse

import numpy as np

from opreal.qstate import make_psi, make_werner
from opreal.witnesses import horodecki_m, optimize_settings, optimize_template_theta


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--restarts", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    theta, rep = optimize_template_theta(1.0, objective="margin")
    print(f"best theta  = {theta:.12f}  (pi/6 = {np.pi / 6:.12f})")
    print(f"margin      = {rep.margin_ratio:.12f}")

    for label, rho in [
        ("Psi(pi/4)", make_psi(np.pi / 4)),
        ("Psi(pi/6)", make_psi(np.pi / 6)),
        ("W(0.8,pi/6)", make_werner(0.8, np.pi / 6)),
    ]:
        res = optimize_settings(rho, "bell", restarts=args.restarts, seed=args.seed)
        print(f"{label:12s} Bell lhs = {res.report.lhs:.9f}   2 + sqrt(M) = {2 + np.sqrt(horodecki_m(rho)):.9f}")


if __name__ == "__main__":
    main()
