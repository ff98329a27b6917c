"""Compare solver variants over the builtin suite.

Runs every (problem, variant, seed) cell, writes the data profiles and the
results index under --out, and prints the mean normalised hypervolume per
problem together with each variant's terminal data-profile fraction.
"""

import argparse
import time
from pathlib import Path

import numpy as np

from dmultimads.cli import run_bench
from dmultimads.problems import REGISTRY


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--problems", default=",".join(sorted(REGISTRY)))
    parser.add_argument("--variants", default="pb,teb,penalty")
    parser.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    parser.add_argument("--budget", type=int, default=5000)
    parser.add_argument("--eps-tau", type=float, nargs="+", default=[0.1])
    parser.add_argument("--out", default="trend_out")
    args = parser.parse_args(argv)

    problems = [p for p in args.problems.split(",") if p]
    variants = [v for v in args.variants.split(",") if v]
    start = time.perf_counter()
    index = run_bench(problems, variants, args.seeds, args.budget, args.eps_tau, Path(args.out))

    print(f"{'problem':<10}" + "".join(f"{v:>10}" for v in variants))
    for p in problems:
        cells = [[c.get("normalized_hv", np.nan) for c in index["cells"]
                  if c["problem"] == p and c["variant"] == v] for v in variants]
        print(f"{p:<10}" + "".join(f"{np.mean(vals):>10.3f}" for vals in cells))
    for key, value in index["terminal_fraction"].items():
        print(f"terminal fraction {key}: {value:.3f}")
    print(f"{len(index['cells'])} runs in {time.perf_counter() - start:.0f} s; outputs in {args.out}")


if __name__ == "__main__":
    main()
