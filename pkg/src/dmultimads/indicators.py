"""Hypervolume, the scale/translate normalisation, convergence tests and
data/convergence profiles."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np


@dataclass(frozen=True)
class FrontApprox:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(0, 0) if pts.size == 0 else pts[None, :]
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def m(self) -> int:
        return self.points.shape[1] if self.points.ndim == 2 else 0

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class ReferenceData:
    front: FrontApprox
    ideal: np.ndarray
    nadir: np.ndarray

    @cached_property
    def reference_hv(self) -> float:
        """Hypervolume of the normalised reference front."""
        r = transform_T(self.nadir, self.ideal, self.nadir)
        return hypervolume(transform_T(self.front.points, self.ideal, self.nadir), r)

    @classmethod
    def from_front(cls, front) -> "ReferenceData":
        if not isinstance(front, FrontApprox):
            front = FrontApprox(front)
        if len(front) == 0:
            raise ValueError("reference front is empty")
        return cls(front, front.points.min(axis=0), front.points.max(axis=0))


def _hv2(P: np.ndarray, ref: np.ndarray) -> float:
    P = P[np.lexsort((P[:, 1], P[:, 0]))]
    y = P[:, 1]
    # best second objective among the points to the left of each point
    before = np.concatenate([[ref[1]], np.minimum.accumulate(y)[:-1]])
    return float(np.sum((ref[0] - P[:, 0]) * np.maximum(before - y, 0.0)))


def _hv_sweep(P: np.ndarray, ref: np.ndarray) -> float:
    m = P.shape[1]
    if P.shape[0] == 0:
        return 0.0
    if m == 1:
        return float(ref[0] - P[:, 0].min())
    if m == 2:
        return _hv2(P, ref)
    # slice along the last objective; between consecutive levels the section is
    # the (m-1)-dimensional hypervolume of every point at or below the level
    P = P[np.argsort(P[:, -1], kind="stable")]
    levels = P[:, -1]
    total = 0.0
    for k in range(P.shape[0]):
        upper = levels[k + 1] if k + 1 < P.shape[0] else ref[-1]
        height = upper - levels[k]
        if height <= 0:
            continue
        total += height * _hv_sweep(P[: k + 1, :-1], ref[:-1])
    return total


def hypervolume(front, ref_point) -> float:
    """Volume dominated by ``front`` and bounded above by ``ref_point``.

    Points not strictly better than the reference in every objective are
    dropped first.
    """
    P = front.points if isinstance(front, FrontApprox) else np.asarray(front, dtype=float)
    ref = np.asarray(ref_point, dtype=float).reshape(-1)
    m = ref.size
    if m > 4:
        raise ValueError(f"hypervolume supports at most 4 objectives, got {m}")
    if P.size == 0:
        return 0.0
    P = np.atleast_2d(P)
    if P.shape[1] != m:
        raise ValueError("front and reference point dimensions differ")
    P = P[np.all(P < ref, axis=1)]
    if P.shape[0] == 0:
        return 0.0
    if m > 2:
        P = _nondominated(P)
    return float(_hv_sweep(P, ref))


def _nondominated(P: np.ndarray) -> np.ndarray:
    P = np.unique(P, axis=0)
    A = P[None, :, :]
    X = P[:, None, :]
    dominated = np.any(np.all(A <= X, axis=2) & np.any(A < X, axis=2), axis=1)
    return P[~dominated]


def transform_T(y, ideal, nadir) -> np.ndarray:
    """Translate by the ideal vector and divide by the ideal-to-nadir range
    on every component where that range is nonzero."""
    y = np.asarray(y, dtype=float)
    ideal = np.asarray(ideal, dtype=float)
    nadir = np.asarray(nadir, dtype=float)
    span = nadir - ideal
    safe = np.where(span != 0, span, 1.0)
    return (y - ideal) / safe


def normalized_hv(Y_e, ref: ReferenceData) -> float:
    """Hypervolume of ``Y_e`` relative to the reference front, both normalised."""
    r = transform_T(ref.nadir, ref.ideal, ref.nadir)
    denom = ref.reference_hv
    if denom <= 0:
        raise ValueError("degenerate reference front: zero hypervolume")
    P = Y_e.points if isinstance(Y_e, FrontApprox) else np.asarray(Y_e, dtype=float)
    if P.size == 0:
        return 0.0
    return hypervolume(transform_T(np.atleast_2d(P), ref.ideal, ref.nadir), r) / denom


def convergence_test(Y_e, ref: ReferenceData, eps_tau: float) -> bool:
    if not 0 < eps_tau < 1:
        raise ValueError("eps_tau must lie in (0, 1)")
    return normalized_hv(Y_e, ref) >= 1 - eps_tau


class _PrefixFront:
    """Nondominated feasible objective vectors of a growing evaluation prefix."""

    def __init__(self):
        self.points: np.ndarray | None = None

    def add(self, f: np.ndarray) -> bool:
        if self.points is None:
            self.points = f[None, :].copy()
            return True
        A = self.points
        if np.any(np.all(A <= f, axis=1)):
            return False  # weakly dominated: the front, hence its hypervolume, is unchanged
        beaten = np.all(A >= f, axis=1)
        self.points = np.vstack([A[~beaten], f])
        return True


def convergence_curve(history: Iterable, ref: ReferenceData, stride: int = 1,
                      total: int | None = None) -> list[tuple[int, float]]:
    """(evaluations, normalised HV clipped to [0, 1]) every ``stride`` evaluations.

    ``history`` yields records with ``f`` and ``h`` attributes in evaluation order.
    """
    if stride < 1:
        raise ValueError("stride must be at least 1")
    records = list(history)
    total = len(records) if total is None else total
    prefix = _PrefixFront()
    rows = []
    value = 0.0
    changed = False
    for e, rec in enumerate(records, start=1):
        if rec.h == 0.0 and np.all(np.isfinite(rec.f)):
            changed |= prefix.add(np.asarray(rec.f, dtype=float))
        if e % stride == 0 or e == total:
            if changed:
                value = min(1.0, max(0.0, normalized_hv(prefix.points, ref)))
                changed = False
            rows.append((e, value))
    return rows


def emit_convergence_profile(history: Iterable, ref: ReferenceData, stride: int = 1,
                             path: Path | str | None = None) -> list[tuple[int, float]]:
    rows = convergence_curve(history, ref, stride)
    if path is not None:
        write_csv(path, ["evals", "normalized_hv"], rows)
    return rows


def first_solved_evaluation(history: Iterable, ref: ReferenceData, eps_tau: float) -> int | None:
    """Smallest evaluation count after which the convergence test passes."""
    if not 0 < eps_tau < 1:
        raise ValueError("eps_tau must lie in (0, 1)")
    prefix = _PrefixFront()
    for e, rec in enumerate(history, start=1):
        if rec.h == 0.0 and np.all(np.isfinite(rec.f)) and prefix.add(np.asarray(rec.f, dtype=float)):
            if normalized_hv(prefix.points, ref) >= 1 - eps_tau:
                return e
    return None


def data_profile(solved_at: Mapping, n_per_problem: Mapping[str, int], k_max: int) -> list[tuple[int, float]]:
    """Fraction of (problem, replication) pairs solved within k groups of n+1 evaluations.

    ``solved_at`` maps ``(problem, replication)`` to the first solving
    evaluation count, or None when never solved.
    """
    total = len(solved_at)
    rows = []
    for k in range(1, k_max + 1):
        hits = sum(1 for (p, _), e in solved_at.items()
                   if e is not None and e <= k * (n_per_problem[p] + 1))
        rows.append((k, hits / total if total else 0.0))
    return rows


def emit_data_profile(solved_at: Mapping, n_per_problem: Mapping[str, int], k_max: int,
                      path: Path | str | None = None) -> list[tuple[int, float]]:
    rows = data_profile(solved_at, n_per_problem, k_max)
    if path is not None:
        write_csv(path, ["k", "fraction"], rows)
    return rows


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
