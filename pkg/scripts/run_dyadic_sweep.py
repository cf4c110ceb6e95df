#!/usr/bin/env python3
"""Budget sweep on the planted-coordinate distribution.

Runs one of the budgeted learners across a geometric grid of sample budgets
and writes per-trial excess losses to CSV.  Useful for eyeballing how many
oracle calls each learner needs before it locks onto the planted coordinate.
"""

import argparse

from subspace_bandits.domain import DomainSpec
from subspace_bandits.harness import ExperimentConfig, emit_csv, run_sweep
from subspace_bandits.oracles import dyadic_fixture


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--algo", default="mbgd", choices=("bandit-pca", "mbgd", "mbeg"))
    parser.add_argument("--d", type=int, default=10)
    parser.add_argument("--s", type=int, default=3, help="planted coordinate (0-based)")
    parser.add_argument("--eps", type=float, default=0.25)
    parser.add_argument("--c", type=float, default=4.0)
    parser.add_argument("--m", type=int, nargs="+", default=[400, 1600, 6400, 25600])
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default="dyadic_sweep.csv")
    args = parser.parse_args()

    cfg = ExperimentConfig(
        domain=DomainSpec(d=args.d, k=1, r=2, G=1.0),
        distribution=dyadic_fixture(args.d, s=args.s, eps=args.eps, c=args.c),
        algo=args.algo,
        m_values=tuple(args.m),
        trials=args.trials,
        base_seed=args.seed,
    )
    records = run_sweep(cfg, workers=args.workers)
    emit_csv(records, args.out)
    for m in cfg.m_values:
        cell = [r.excess_loss for r in records if r.m == m]
        print(f"m={m:>7d}  mean excess {sum(cell) / len(cell):.4f}")
    print(f"wrote {len(records)} records to {args.out}")


if __name__ == "__main__":
    main()
