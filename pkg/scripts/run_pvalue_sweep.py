"""p-value and relative gap to the ground state across a sampler temperature grid.

One row per grid point: beta_mh, h_min, delta_h, p_value, beta estimate.
"""

import argparse
import csv
import sys

from annealer_audit.estimators import DEFAULT_ALPHA, ModelParams
from annealer_audit.experiments import pvalue_sweep
from annealer_audit.ising import random_instance
from annealer_audit.sampler import MhConfig


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--num-spins", type=int, default=16)
    p.add_argument("--instance-seed", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--S", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--grid", default="0.05,0.1,0.2,0.3,0.5,0.8,1.0,1.375,2.0")
    args = p.parse_args()

    inst = random_instance(args.num_spins, "full", 0.0, 1.0, 0.5, seed=args.instance_seed)
    grid = [float(b) for b in args.grid.split(",")]
    points = pvalue_sweep(inst, grid, ModelParams(args.alpha), MhConfig(grid[0], args.n, seed=args.seed), args.S)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["beta_mh", "h_min", "delta_h", "p_value", "beta_estimated"])
    for pt in points:
        est = pt.report.direct_estimate
        beta = est.beta if est is not None and est.beta is not None else float("nan")
        w.writerow([pt.beta_mh, repr(pt.h_min), repr(pt.delta_h), pt.p_value, repr(beta)])


if __name__ == "__main__":
    main()
