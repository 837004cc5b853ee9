"""Estimated beta and E0 against the sampler temperature on one random instance.

Prints the sweep CSV (same columns as ``annealer-audit beta-recovery``) to stdout.
"""

import argparse
import sys

from annealer_audit.estimators import DEFAULT_ALPHA, ModelParams
from annealer_audit.experiments import beta_recovery
from annealer_audit.io import format_sweep
from annealer_audit.ising import random_instance
from annealer_audit.sampler import MhConfig


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--num-spins", type=int, default=16)
    p.add_argument("--instance-seed", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--grid", default="0.1,0.2,0.3,0.5,0.8,1.0,1.375,2.0")
    args = p.parse_args()

    inst = random_instance(args.num_spins, "full", 0.0, 1.0, 0.5, seed=args.instance_seed)
    grid = [float(b) for b in args.grid.split(",")]
    rows = beta_recovery(inst, grid, ModelParams(args.alpha), MhConfig(grid[0], args.n, seed=args.seed))
    sys.stdout.write(format_sweep(rows))


if __name__ == "__main__":
    main()
