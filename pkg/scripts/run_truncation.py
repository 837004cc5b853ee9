"""Paired p-values for MH samples with and without their lowest 5% of energies."""

import argparse

from annealer_audit.estimators import DEFAULT_ALPHA, ModelParams
from annealer_audit.experiments import contains_ground_state, paired_truncation
from annealer_audit.ising import brute_force_ground, random_instance
from annealer_audit.sampler import MhConfig, run_chain


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--num-spins", type=int, default=12)
    p.add_argument("--instance-seed", type=int, default=0)
    p.add_argument("--beta-mh", type=float, default=2.0)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--S", type=int, default=1000)
    p.add_argument("--fraction", type=float, default=0.05)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    args = p.parse_args()

    inst = random_instance(args.num_spins, "full", 0.0, 1.0, 0.5, seed=args.instance_seed)
    e0, _ = brute_force_ground(inst)
    print("seed,contains_e0,p_full,p_truncated")
    for seed in range(args.runs):
        sample = run_chain(inst, MhConfig(args.beta_mh, args.n, seed=seed)).sample
        p_full, p_trunc = paired_truncation(sample, ModelParams(args.alpha), args.fraction, args.S, seed=seed)
        print(f"{seed},{int(contains_ground_state(sample, e0))},{p_full},{p_trunc}")


if __name__ == "__main__":
    main()
