"""Progressive-barrier bookkeeping: iteration outcomes, trial frame sizes, the
violation threshold and the iterate-list refresh."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import INF, Evaluation, IncumbentEntry
from .selection import FEASIBLE, INFEASIBLE, IterateList


class IterationOutcome(enum.Enum):
    DOMINATING = "dominating"
    IMPROVING = "improving"
    UNSUCCESSFUL = "unsuccessful"


@dataclass(frozen=True)
class BarrierState:
    h_max: float = INF
    L_F: IterateList = field(default_factory=lambda: IterateList((), FEASIBLE))
    L_I: IterateList = field(default_factory=lambda: IterateList((), INFEASIBLE))


def _dom(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.all(a <= b) and np.any(a < b))


def dominates_center(trial: Evaluation, x_F: IncumbentEntry | None, x_I: IncumbentEntry | None) -> bool:
    """Does ``trial`` dominate a present frame center under the matching relation?"""
    if trial.h == 0.0:
        return x_F is not None and _dom(trial.f, x_F.eval.f)
    if 0.0 < trial.h < INF and x_I is not None:
        return _dom(np.append(trial.f, trial.h), np.append(x_I.eval.f, x_I.eval.h))
    return False


def is_improving(trial: Evaluation, x_I: IncumbentEntry | None) -> bool:
    if x_I is None or not 0.0 < trial.h < x_I.eval.h:
        return False
    return bool(np.any(x_I.eval.f < trial.f))


def classify_iteration(trials: Sequence[Evaluation], x_F: IncumbentEntry | None,
                       x_I: IncumbentEntry | None) -> IterationOutcome:
    if x_F is None and x_I is None:
        raise ValueError("classification needs at least one frame center")
    if any(dominates_center(t, x_F, x_I) for t in trials):
        return IterationOutcome.DOMINATING
    if any(is_improving(t, x_I) for t in trials):
        return IterationOutcome.IMPROVING
    return IterationOutcome.UNSUCCESSFUL


def _stack(points):
    if isinstance(points, IterateList):
        if not len(points):
            return None, None
        return points.objectives, points.violations
    pts = list(points)
    if not pts:
        return None, None
    return np.vstack([p.f for p in pts]), np.array([p.h for p in pts])


def assign_trial_frame_size(trial: Evaluation, F_now, I_now, delta_frame: float, tau: float) -> float:
    """Frame size given to a new point: enlarged when it dominates or extends a list.

    ``F_now`` and ``I_now`` are sequences of evaluations or iterate lists.
    """
    enlarged = delta_frame / tau
    if trial.h == INF:
        return delta_frame
    if trial.h == 0.0:
        F, _ = _stack(F_now)
        if F is None:
            return enlarged  # componentwise minimum over an empty set is +inf
        if np.any(np.all(trial.f <= F, axis=1) & np.any(trial.f < F, axis=1)):
            return enlarged
        fmin = F.min(axis=0)
        if np.all(trial.f <= fmin) and np.any(trial.f < fmin):
            return enlarged
        return delta_frame
    F, H = _stack(I_now)
    if F is None:
        return delta_frame
    t = np.append(trial.f, trial.h)
    A = np.column_stack([F, H])
    if np.any(np.all(t <= A, axis=1) & np.any(t < A, axis=1)):
        return enlarged
    fmin = F.min(axis=0)
    if trial.h <= H.max() and np.all(trial.f <= fmin) and np.any(trial.f < fmin):
        return enlarged
    return delta_frame


def update_h_max(candidate_h: Iterable[float], I_k: Sequence[Evaluation], x_I: IncumbentEntry,
                 outcome: IterationOutcome, h_max: float = INF) -> float:
    """New violation threshold.

    ``candidate_h`` holds the violations of the points the threshold is read
    from (the current nondominated infeasible points). Only strictly positive
    values are considered. Returns ``h_max`` unchanged when no infeasible
    frame center existed.
    """
    if x_I is None:
        return h_max
    hs = np.array([h for h in candidate_h if 0.0 < h < INF], dtype=float)
    h_i = x_I.eval.h
    if outcome is IterationOutcome.IMPROVING:
        below = hs[hs < h_i]
        if below.size == 0:
            raise ValueError("improving iteration without any point below the incumbent violation")
        new = float(below.max())
    else:
        h_top = max(e.h for e in I_k)
        if h_i == h_top:
            new = h_i
        else:
            window = hs[(hs >= h_i) & (hs < h_top)]
            new = float(window.max()) if window.size else h_i
    return new


def _row(e: IncumbentEntry, relation: str) -> np.ndarray:
    return e.eval.f if relation == FEASIBLE else np.append(e.eval.f, e.eval.h)


def _merge(entries: IterateList, additions: Sequence[IncumbentEntry], relation: str) -> IterateList:
    """Insert ``additions`` into an already nondominated list, keeping insertion order."""
    archive = NondominatedArchive(0)
    if len(entries):
        rows = entries.objectives
        if relation == INFEASIBLE:
            rows = np.column_stack([rows, entries.violations])
        archive.rows = rows
        archive.items = list(entries.entries)
    for e in additions:
        archive.insert(_row(e, relation), e)
    rows = archive.rows
    m = rows.shape[1] - (1 if relation == INFEASIBLE else 0)
    violations = rows[:, m] if relation == INFEASIBLE else None
    return IterateList.with_arrays(archive.items, relation, rows[:, :m], violations)


def refresh_lists(state: BarrierState, new_points: Sequence[IncumbentEntry]) -> BarrierState:
    """Merge new points into the lists under the state's threshold and re-filter."""
    new_feas = [p for p in new_points if p.eval.h == 0.0]
    new_infeas = [p for p in new_points if 0.0 < p.eval.h <= state.h_max and p.eval.h < INF]
    L_I = state.L_I
    if len(L_I) and np.any(L_I.violations > state.h_max):
        keep = L_I.violations <= state.h_max
        L_I = IterateList.with_arrays([e for e, k in zip(L_I.entries, keep) if k], INFEASIBLE,
                                      L_I.objectives[keep], L_I.violations[keep])
    L_F = state.L_F
    if new_feas:
        L_F = _merge(state.L_F, new_feas, FEASIBLE)
    if new_infeas:
        L_I = _merge(L_I, new_infeas, INFEASIBLE)
    return BarrierState(state.h_max, L_F, L_I)


class NondominatedArchive:
    """Incrementally maintained set of rows not dominated by any row ever inserted."""

    def __init__(self, width: int):
        self.rows = np.empty((0, width))
        self.items: list = []

    def insert(self, row, item=None) -> bool:
        row = np.asarray(row, dtype=float)
        A = self.rows
        if A.shape[0] == 0:
            self.rows = row[None, :].copy()
            self.items = [item]
            return True
        if A.shape[0]:
            if np.any(np.all(A <= row, axis=1) & np.any(A < row, axis=1)):
                return False
            beaten = np.all(A >= row, axis=1) & np.any(A > row, axis=1)
            if beaten.any():
                keep = ~beaten
                self.rows = A[keep]
                self.items = [it for it, k in zip(self.items, keep) if k]
        self.rows = np.vstack([self.rows, row])
        self.items.append(item)
        return True

    def __len__(self):
        return len(self.items)
