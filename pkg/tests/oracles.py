"""Independent reference implementations used as test oracles.

These are deliberately naive: quadratic dominance scans, inclusion-exclusion
over box intersections and Monte Carlo volume estimates.
"""

from itertools import combinations

import numpy as np


def brute_dominates(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def brute_nondominated(rows) -> list[int]:
    rows = [tuple(r) for r in rows]
    return [i for i, r in enumerate(rows)
            if not any(brute_dominates(s, r) for j, s in enumerate(rows) if j != i)]


def hv_inclusion_exclusion(points, ref) -> float:
    """Union volume of the boxes [p, ref] by inclusion-exclusion over all subsets."""
    pts = [np.asarray(p, float) for p in points if np.all(np.asarray(p) < ref)]
    ref = np.asarray(ref, float)
    total = 0.0
    for k in range(1, len(pts) + 1):
        sign = 1.0 if k % 2 else -1.0
        for subset in combinations(pts, k):
            corner = np.max(np.vstack(subset), axis=0)
            total += sign * float(np.prod(np.clip(ref - corner, 0.0, None)))
    return total


def hv_monte_carlo(points, ref, samples: int = 1_000_000, seed: int = 0, chunk: int = 100_000) -> float:
    """Fraction of uniform samples in the bounding box that some point dominates, times the box volume."""
    P = np.asarray(points, float)
    ref = np.asarray(ref, float)
    P = P[np.all(P < ref, axis=1)]
    if P.shape[0] == 0:
        return 0.0
    lo = P.min(axis=0)
    volume = float(np.prod(ref - lo))
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        S = lo + rng.random((k, P.shape[1])) * (ref - lo)
        covered = np.zeros(k, dtype=bool)
        for p in P:
            covered |= np.all(S >= p, axis=1)
        hits += int(covered.sum())
        done += k
    return volume * hits / samples


def weakly_dominated_by_any(F, f) -> bool:
    return any(all(a <= b for a, b in zip(row, f)) for row in F)


def brute_nondominated_matrix(F) -> set[int]:
    """Pairwise dominance matrix scan; returns indices not dominated by any row."""
    F = np.asarray(F, float)
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    dominated_by = le & lt  # [i, j]: row i dominates row j
    return set(np.flatnonzero(~dominated_by.any(axis=0)).tolist())
