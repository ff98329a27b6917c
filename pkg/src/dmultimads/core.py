"""Domain types, constraint violation, dominance relations and the evaluation cache."""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

INF = math.inf


class ConfigurationError(ValueError):
    """Raised when a run cannot start (bad bounds, no usable starting point, ...)."""


class BlackboxIOError(RuntimeError):
    """Raised when the blackbox cannot be spawned at all (distinct from a hidden failure)."""


class Status(enum.Enum):
    OK = "ok"
    HIDDEN_FAILURE = "hidden_failure"


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ProblemSpec:
    n: int
    m: int
    j_count: int
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _frozen_array(self.lower)
        upper = _frozen_array(self.upper)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if self.n < 1 or self.m < 1 or self.j_count < 0:
            raise ConfigurationError(f"invalid dimensions n={self.n} m={self.m} J={self.j_count}")
        if lower.shape != (self.n,) or upper.shape != (self.n,):
            raise ConfigurationError("bound vectors must have length n")
        if np.any(lower > upper):
            raise ConfigurationError("lower bound exceeds upper bound")

    def within_bounds(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def scale(self) -> np.ndarray:
        """Per-variable mesh scaling: (upper - lower) / 10 on finite ranges, 1 elsewhere."""
        width = self.upper - self.lower
        s = np.where(np.isfinite(width) & (width > 0), width / 10.0, 1.0)
        return s


@dataclass(frozen=True, eq=False)
class Evaluation:
    x: np.ndarray
    f: np.ndarray
    c: np.ndarray
    h: float
    status: Status = Status.OK

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen_array(self.x))
        object.__setattr__(self, "f", _frozen_array(self.f))
        object.__setattr__(self, "c", _frozen_array(self.c))
        object.__setattr__(self, "h", float(self.h))

    @property
    def feasible(self) -> bool:
        return self.h == 0.0

    @property
    def key(self) -> tuple:
        return point_key(self.x)

    def __repr__(self):
        return (f"Evaluation(x={self.x.tolist()}, f={self.f.tolist()}, "
                f"h={self.h!r}, status={self.status.value})")


@dataclass(frozen=True, eq=False)
class IncumbentEntry:
    """An evaluated point with its own frame size.

    ``direction`` and ``gen_delta_mesh`` remember the successful mesh step that
    produced the point, when there was one; the speculative search reuses it.
    """

    eval: Evaluation
    delta_frame: float
    direction: tuple | None = None
    gen_delta_mesh: float | None = None

    def __post_init__(self):
        if not self.delta_frame > 0:
            raise ValueError(f"frame size must be positive, got {self.delta_frame}")

    def with_delta(self, delta_frame: float) -> "IncumbentEntry":
        return IncumbentEntry(self.eval, delta_frame, self.direction, self.gen_delta_mesh)


def point_key(x) -> tuple:
    # float tuples hash 0.0 and -0.0 identically, matching float equality
    return tuple(float(v) for v in np.asarray(x, dtype=float).reshape(-1))


def compute_h(c, within_bounds: bool = True) -> float:
    """Sum of squared positive constraint parts; +inf off the bound set or on infinite outputs."""
    if not within_bounds:
        return INF
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.size == 0:
        return 0.0
    if np.any(np.isnan(c)) or np.any(c == INF):
        return INF
    pos = np.maximum(c, 0.0)
    return float(np.sum(pos * pos))


def hidden_failure(x, m: int, j_count: int) -> Evaluation:
    return Evaluation(x, np.full(m, INF), np.full(j_count, INF), INF, Status.HIDDEN_FAILURE)


def make_evaluation(x, f, c, spec: ProblemSpec) -> Evaluation:
    """Build an Evaluation from raw blackbox outputs.

    NaN outputs become +inf. A non-finite objective makes the whole record a
    hidden failure, since nothing downstream can rank it.
    """
    f = np.asarray(f, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float).reshape(-1)
    if f.shape != (spec.m,) or c.shape != (spec.j_count,):
        return hidden_failure(x, spec.m, spec.j_count)
    f = np.where(np.isnan(f), INF, f)
    c = np.where(np.isnan(c), INF, c)
    if not np.all(np.isfinite(f)):
        return hidden_failure(x, spec.m, spec.j_count)
    return Evaluation(x, f, c, compute_h(c, spec.within_bounds(x)))


def _dominates(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.all(a <= b) and np.any(a < b))


def dominates_feasible(a: Evaluation, b: Evaluation) -> bool:
    if a.h != 0.0 or b.h != 0.0:
        raise ValueError("feasible dominance requires two feasible points")
    return _dominates(a.f, b.f)


def dominates_infeasible(a: Evaluation, b: Evaluation) -> bool:
    for e in (a, b):
        if not (0.0 < e.h < INF):
            raise ValueError("infeasible dominance requires 0 < h < inf on both points")
    return _dominates(np.append(a.f, a.h), np.append(b.f, b.h))


def criteria(e: Evaluation, relation: str) -> np.ndarray:
    """Vector compared under the given relation: f, or (f, h) for infeasible points."""
    if relation == "feasible":
        return e.f
    if relation == "infeasible":
        return np.append(e.f, e.h)
    raise ValueError(f"unknown relation {relation!r}")


def nondominated_indices(vectors: np.ndarray) -> list[int]:
    """Indices (ascending) of rows not Pareto-dominated by any other row.

    Sequential archive insertion: each row is tested against the current
    archive, and evicts the archive members it dominates. A row dominated by
    an evicted member is also dominated by the evictor (transitivity), so the
    result is the exact nondominated set. Equal rows never dominate each other
    and are all kept.
    """
    vectors = np.asarray(vectors, dtype=float)
    if vectors.ndim != 2:
        raise ValueError("expected a 2-d array")
    keep: list[int] = []
    archive = np.empty((0, vectors.shape[1]))
    for i, v in enumerate(vectors):
        if archive.shape[0]:
            le = archive <= v
            if np.any(np.all(le, axis=1) & np.any(archive < v, axis=1)):
                continue
            ge = archive >= v
            beaten = np.all(ge, axis=1) & np.any(archive > v, axis=1)
            if beaten.any():
                survivors = ~beaten
                archive = archive[survivors]
                keep = [k for k, s in zip(keep, survivors) if s]
        archive = np.vstack([archive, v])
        keep.append(i)
    return keep


def pareto_filter(points: Sequence[Evaluation], relation: str = "feasible") -> list[Evaluation]:
    points = list(points)
    if not points:
        return []
    if relation == "feasible":
        bad = [p for p in points if p.h != 0.0]
    else:
        bad = [p for p in points if not (0.0 < p.h < INF)]
    if bad:
        raise ValueError(f"{len(bad)} point(s) violate the {relation} precondition")
    vecs = np.vstack([criteria(p, relation) for p in points])
    return [points[i] for i in nondominated_indices(vecs)]


@dataclass
class Cache:
    """Evaluated points keyed by exact coordinates (the set of trial points evaluated so far)."""

    entries: dict = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def probe(self, x) -> Evaluation | None:
        return self.entries.get(point_key(x))

    def insert(self, e: Evaluation) -> None:
        key = e.key
        with self._lock:
            if key in self.entries:
                raise KeyError(f"point {list(key)} already cached")
            self.entries[key] = e

    def __len__(self):
        return len(self.entries)

    def __iter__(self) -> Iterable[Evaluation]:
        return iter(list(self.entries.values()))


def cache_probe(cache: Cache, x) -> Evaluation | None:
    return cache.probe(x)
