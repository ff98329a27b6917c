"""Reference Pareto fronts for the builtin problems (dense grids or uniform samples)."""

from __future__ import annotations

import csv
from importlib import resources
from pathlib import Path

import numpy as np

from ..indicators import FrontApprox
from .builtin import BuiltinProblem, get_problem

DEFAULT_GRID = 1000
DEFAULT_SAMPLES = 1_000_000
SAMPLE_SEED = 20220101
_BLOCK = 2048


def front_of(F: np.ndarray) -> np.ndarray:
    """Nondominated rows of a large objective array, duplicates collapsed, sorted lexicographically."""
    F = np.unique(np.asarray(F, dtype=float), axis=0)
    if F.shape[0] <= 1:
        return F
    if F.shape[1] == 2:
        # np.unique already sorted by (f1, f2); keep strict improvements in f2
        best = np.minimum.accumulate(F[:, 1])
        keep = np.ones(F.shape[0], dtype=bool)
        keep[1:] = F[1:, 1] < best[:-1]
        return F[keep]
    # a dominator always has a strictly smaller coordinate sum, so sweep by sum
    F = F[np.argsort(F.sum(axis=1), kind="stable")]
    front = np.empty((0, F.shape[1]))
    for start in range(0, F.shape[0], _BLOCK):
        B = F[start:start + _BLOCK]
        if front.shape[0]:
            dom = np.zeros(B.shape[0], dtype=bool)
            for fs in range(0, front.shape[0], _BLOCK):
                A = front[fs:fs + _BLOCK][None, :, :]
                Bx = B[:, None, :]
                dom |= np.any(np.all(A <= Bx, axis=2) & np.any(A < Bx, axis=2), axis=1)
            B = B[~dom]
        if B.shape[0] > 1:
            A = B[None, :, :]
            Bx = B[:, None, :]
            dom = np.any(np.all(A <= Bx, axis=2) & np.any(A < Bx, axis=2), axis=1)
            B = B[~dom]
        front = np.vstack([front, B])
    return front[np.lexsort(front.T[::-1])]


def reference_front(problem: BuiltinProblem | str, grid_per_dim: int = DEFAULT_GRID,
                    samples: int = DEFAULT_SAMPLES, seed: int = SAMPLE_SEED) -> FrontApprox:
    """Feasible nondominated objective vectors over a grid (n = 2) or a uniform sample."""
    if isinstance(problem, str):
        problem = get_problem(problem)
    spec = problem.spec
    if problem.sampling == "grid":
        if spec.n > 3:
            raise ValueError("full grids are limited to n <= 3")
        axes = [np.linspace(lo, hi, grid_per_dim) for lo, hi in zip(spec.lower, spec.upper)]
        X = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, spec.n)
    else:
        rng = np.random.default_rng(seed)
        X = spec.lower + rng.random((samples, spec.n)) * (spec.upper - spec.lower)
    feasible = []
    for start in range(0, X.shape[0], 200_000):
        F, C = problem.evaluator(X[start:start + 200_000])
        ok = np.all(C <= 0, axis=1) & np.all(np.isfinite(F), axis=1)
        if ok.any():
            feasible.append(front_of(F[ok]))
    if not feasible:
        raise ValueError(f"no feasible point found while sampling {problem.name}")
    return FrontApprox(front_of(np.vstack(feasible)))


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("dmultimads") / "data" / "fronts" / f"{name}.csv"))


def write_front_csv(points: np.ndarray, path: Path) -> None:
    points = np.atleast_2d(points)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"f_{i + 1}" for i in range(points.shape[1])])
        for row in points:
            w.writerow([format(float(v), ".17g") for v in row])


def read_front_csv(path: Path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if not body:
        return np.empty((0, len(header)))
    return np.array([[float(v) for v in r] for r in body])


def load_reference(name: str) -> FrontApprox:
    path = fixture_path(name)
    if not path.exists():
        raise FileNotFoundError(f"no reference fixture for {name!r}; run `dmultimads reference`")
    return FrontApprox(read_front_csv(path))
