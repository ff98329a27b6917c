"""Frame-center selection over the feasible and infeasible iterate lists."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .core import IncumbentEntry

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class IterateList:
    entries: tuple[IncumbentEntry, ...] = ()
    kind: str = FEASIBLE

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.kind not in (FEASIBLE, INFEASIBLE):
            raise ValueError(f"unknown list kind {self.kind!r}")

    @classmethod
    def with_arrays(cls, entries, kind, objectives=None, violations=None, deltas=None) -> "IterateList":
        """Build a list whose cached arrays are already known (avoids restacking)."""
        lst = cls(tuple(entries), kind)
        for name, value in (("objectives", objectives), ("violations", violations), ("deltas", deltas)):
            if value is not None:
                lst.__dict__[name] = value
        return lst

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @cached_property
    def objectives(self) -> np.ndarray:
        if not self.entries:
            return np.empty((0, 0))
        return np.vstack([e.eval.f for e in self.entries])

    @cached_property
    def violations(self) -> np.ndarray:
        return np.array([e.eval.h for e in self.entries], dtype=float)

    @cached_property
    def deltas(self) -> np.ndarray:
        return np.array([e.delta_frame for e in self.entries], dtype=float)


@dataclass(frozen=True)
class FrameCenterChoice:
    primary: IncumbentEntry
    secondary: IncumbentEntry | None = None
    primary_is_infeasible: bool = False


def _as_list(entries, kind=FEASIBLE) -> IterateList:
    return entries if isinstance(entries, IterateList) else IterateList(tuple(entries), kind)


def delta_max(lst) -> float:
    lst = _as_list(lst)
    if not len(lst):
        raise ValueError("delta_max of an empty list")
    return float(lst.deltas.max())


def gamma_spacing(values: Sequence[float]) -> np.ndarray:
    """Spacing of each value among its sorted neighbours, normalised by the range.

    Returned in the order of ``values``. Endpoints get twice the gap to their
    single neighbour. A zero range yields all zeros.
    """
    values = np.asarray(values, dtype=float)
    k = values.size
    if k < 2:
        return np.zeros(k)
    order = np.argsort(values, kind="stable")
    s = values[order]
    span = s[-1] - s[0]
    gamma_sorted = np.zeros(k)
    if span > 0:
        gamma_sorted[0] = 2.0 * (s[1] - s[0]) / span
        gamma_sorted[-1] = 2.0 * (s[-1] - s[-2]) / span
        if k > 2:
            gamma_sorted[1:-1] = (s[2:] - s[:-2]) / span
    out = np.empty(k)
    out[order] = gamma_sorted
    return out


def spread_scores(lst: IterateList) -> np.ndarray:
    """max over objectives of the gamma spacing, per entry."""
    F = lst.objectives
    return np.max(np.column_stack([gamma_spacing(F[:, i]) for i in range(F.shape[1])]), axis=1)


def _first_argmax(values: np.ndarray, candidates: np.ndarray) -> int:
    vals = values[candidates]
    return int(candidates[int(np.argmax(vals))])  # argmax returns the first maximum


def select_feasible_center(L_F, tau: float, w_plus: int = 1) -> IncumbentEntry:
    L_F = _as_list(L_F)
    if not len(L_F):
        raise ValueError("empty feasible list")
    dmax = delta_max(L_F)
    eligible = np.flatnonzero((L_F.deltas >= tau ** w_plus * dmax) & (L_F.deltas <= dmax))
    if len(L_F) <= 2:
        score = L_F.objectives.max(axis=1)
    else:
        score = spread_scores(L_F)
    return L_F[_first_argmax(score, eligible)]


def select_infeasible_center_nofeasible(L_I) -> IncumbentEntry:
    L_I = _as_list(L_I, INFEASIBLE)
    if not len(L_I):
        raise ValueError("empty infeasible list")
    delta_hmin = L_I.deltas[int(np.argmin(L_I.violations))]
    select = np.flatnonzero(L_I.deltas >= delta_hmin)
    if select.size == 1:
        return L_I[int(select[0])]
    if select.size == 2 and len(L_I) == 2:
        return L_I[_first_argmax(L_I.objectives.max(axis=1), select)]
    return L_I[_first_argmax(spread_scores(L_I), select)]


def psi_values(F_incumbents: np.ndarray, F_points: np.ndarray) -> np.ndarray:
    """Vectorised psi for each row of ``F_points`` against the incumbent objective rows."""
    A = np.asarray(F_incumbents, dtype=float)[None, :, :]
    X = np.atleast_2d(np.asarray(F_points, dtype=float))[:, None, :]
    weakly_dominated = np.any(np.all(A <= X, axis=2), axis=1)
    gain = np.min(np.sum(np.maximum(A - X, 0.0), axis=2), axis=1)
    loss = np.min(np.sum(np.maximum(X - A, 0.0), axis=2), axis=1)
    return np.where(weakly_dominated, -loss, gain)


def psi_value(L_F, f_x) -> float:
    L_F = _as_list(L_F)
    if not len(L_F):
        raise ValueError("empty feasible list")
    return float(psi_values(L_F.objectives, np.asarray(f_x, dtype=float))[0])


def select_infeasible_center_withfeasible(L_I, L_F) -> IncumbentEntry:
    L_I = _as_list(L_I, INFEASIBLE)
    L_F = _as_list(L_F)
    if not len(L_I) or not len(L_F):
        raise ValueError("both lists must be nonempty")
    psi = psi_values(L_F.objectives, L_I.objectives)
    return L_I[int(np.argmax(psi))]


def _mu(a: float, b: float) -> float:
    return abs(a - b) if a != b else abs(a)


def xi_value(L_F) -> float:
    F = _as_list(L_F).objectives
    if not F.size:
        raise ValueError("empty feasible list")
    return float(sum(_mu(hi, lo) for hi, lo in zip(F.max(axis=0), F.min(axis=0))))


def order_frame_centers(x_F: IncumbentEntry, x_I: IncumbentEntry, L_F, rho: float) -> FrameCenterChoice:
    if not rho > 0:
        raise ValueError("rho must be positive")
    if psi_value(L_F, x_I.eval.f) - rho * xi_value(L_F) > 0:
        return FrameCenterChoice(x_I, x_F, True)
    return FrameCenterChoice(x_F, x_I, False)


def select_frame_centers(L_F: IterateList, L_I: IterateList, tau: float, w_plus: int,
                         rho: float) -> FrameCenterChoice:
    """Pick and order the frame centers for one iteration."""
    if len(L_F) and len(L_I):
        x_F = select_feasible_center(L_F, tau, w_plus)
        x_I = select_infeasible_center_withfeasible(L_I, L_F)
        return order_frame_centers(x_F, x_I, L_F, rho)
    if len(L_F):
        return FrameCenterChoice(select_feasible_center(L_F, tau, w_plus))
    if len(L_I):
        return FrameCenterChoice(select_infeasible_center_nofeasible(L_I), None, True)
    raise ValueError("no frame center available: both iterate lists are empty")
