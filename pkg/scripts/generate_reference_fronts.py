"""Regenerate the reference-front fixtures shipped with the package.

Two-variable problems use a 1000 x 1000 grid; the others use 10^6 uniform
samples drawn from a fixed seed.
"""

import argparse
import time

from dmultimads.problems import REGISTRY
from dmultimads.problems.reference import (DEFAULT_GRID, DEFAULT_SAMPLES, fixture_path,
                                           reference_front, write_front_csv)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("problems", nargs="*", default=sorted(REGISTRY))
    parser.add_argument("--grid", type=int, default=DEFAULT_GRID)
    parser.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    args = parser.parse_args(argv)
    for name in args.problems:
        start = time.perf_counter()
        front = reference_front(name, args.grid, args.samples)
        path = fixture_path(name)
        write_front_csv(front.points, path)
        print(f"{name}: {len(front)} points -> {path} ({time.perf_counter() - start:.1f}s)")


if __name__ == "__main__":
    main()
