#!/usr/bin/env python3
"""Run the two lower-bound demonstrations and print the summary table."""

import argparse
import sys

from subspace_bandits.harness import run_lower_bound_demos


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=500)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()
    return run_lower_bound_demos(seed=args.seed, trials=args.trials, workers=args.workers)


if __name__ == "__main__":
    sys.exit(main())
