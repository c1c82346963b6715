"""Monte-Carlo estimates of the template steering sum versus sample size."""

import argparse

import numpy as np

from opreal.protocols import sample_experiment, template_scenario
from opreal.qstate import make_werner


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--f", type=float, default=0.8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    s = template_scenario(make_werner(args.f, np.pi / 6), np.pi / 6)
    print(f"{'n':>9} {'estimate':>10} {'exact':>10} {'se':>10} {'z':>7}")
    for n in (10**2, 10**3, 10**4, 10**5, 10**6):
        r = sample_experiment(s, n, args.seed)
        print(f"{n:9d} {r.estimate:10.6f} {r.exact:10.6f} {r.standard_error:10.6f} {r.z_score:7.2f}")


if __name__ == "__main__":
    main()
