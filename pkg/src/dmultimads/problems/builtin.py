"""Analytical constrained multiobjective test problems.

Every evaluator is vectorised: it maps an ``(N, n)`` array to objective and
constraint arrays of shapes ``(N, m)`` and ``(N, J)``. Constraints follow
the ``c(x) <= 0`` convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core import ConfigurationError, Evaluation, ProblemSpec, make_evaluation

Evaluator = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class BuiltinProblem:
    name: str
    spec: ProblemSpec
    evaluator: Evaluator
    known_feasible_start: tuple
    known_infeasible_start: tuple
    sampling: str = "grid"  # how the reference front is built: "grid" or "random"

    def raw(self, x) -> tuple[np.ndarray, np.ndarray]:
        F, C = self.evaluator(np.atleast_2d(np.asarray(x, dtype=float)))
        return F[0], C[0]

    def evaluate(self, x) -> Evaluation:
        f, c = evaluate_builtin(self, x)
        return make_evaluation(x, f, c, self.spec)

    def default_starts(self, variant: str) -> list[tuple]:
        if variant == "eb":
            return [self.known_feasible_start]
        return [self.known_infeasible_start]


def evaluate_builtin(problem: BuiltinProblem, x) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.spec.n,):
        raise ValueError(f"{problem.name} expects a vector of length {problem.spec.n}")
    if not problem.spec.within_bounds(x):
        raise ValueError(f"{x.tolist()} lies outside the bounds of {problem.name}")
    return problem.raw(x)


def _bnh(X):
    x1, x2 = X[:, 0], X[:, 1]
    F = np.column_stack([4 * x1**2 + 4 * x2**2, (x1 - 5) ** 2 + (x2 - 5) ** 2])
    C = np.column_stack([(x1 - 5) ** 2 + x2**2 - 25, 7.7 - (x1 - 8) ** 2 - (x2 + 3) ** 2])
    return F, C


def _srn(X):
    x1, x2 = X[:, 0], X[:, 1]
    F = np.column_stack([2 + (x1 - 2) ** 2 + (x2 - 1) ** 2, 9 * x1 - (x2 - 1) ** 2])
    C = np.column_stack([x1**2 + x2**2 - 225, x1 - 3 * x2 + 10])
    return F, C


def _tnk(X):
    x1, x2 = X[:, 0], X[:, 1]
    F = np.column_stack([x1, x2])
    C = np.column_stack([
        -(x1**2) - x2**2 + 1 + 0.1 * np.cos(16 * np.arctan2(x1, x2)),
        (x1 - 0.5) ** 2 + (x2 - 0.5) ** 2 - 0.5,
    ])
    return F, C


def _osy(X):
    x1, x2, x3, x4, x5, x6 = X.T
    f1 = -(25 * (x1 - 2) ** 2 + (x2 - 2) ** 2 + (x3 - 1) ** 2 + (x4 - 4) ** 2 + (x5 - 1) ** 2)
    f2 = np.sum(X**2, axis=1)
    g = np.column_stack([
        x1 + x2 - 2,
        6 - x1 - x2,
        2 - x2 + x1,
        2 - x1 + 3 * x2,
        4 - (x3 - 3) ** 2 - x4,
        (x5 - 3) ** 2 + x6 - 4,
    ])
    return np.column_stack([f1, f2]), -g


def _constr(X):
    x1, x2 = X[:, 0], X[:, 1]
    F = np.column_stack([x1, (1 + x2) / x1])
    C = np.column_stack([6 - x2 - 9 * x1, 1 + x2 - 9 * x1])
    return F, C


_C2DTLZ2_RADIUS = 0.4


def _c2dtlz2(X, m=3):
    g = np.sum((X[:, m - 1:] - 0.5) ** 2, axis=1)
    theta = X[:, : m - 1] * np.pi / 2
    F = np.empty((X.shape[0], m))
    for i in range(m):
        v = 1 + g
        v = v * np.prod(np.cos(theta[:, : m - 1 - i]), axis=1)
        if i > 0:
            v = v * np.sin(theta[:, m - 1 - i])
        F[:, i] = v
    r2 = _C2DTLZ2_RADIUS**2
    sq = F**2
    corner = np.min((F - 1) ** 2 + (sq.sum(axis=1, keepdims=True) - sq) - r2, axis=1)
    center = np.sum((F - 1 / np.sqrt(m)) ** 2, axis=1) - r2
    return F, np.minimum(corner, center)[:, None]


def _spec(n, m, j, lower, upper) -> ProblemSpec:
    return ProblemSpec(n, m, j, np.asarray(lower, float), np.asarray(upper, float))


REGISTRY: dict[str, BuiltinProblem] = {
    p.name: p
    for p in [
        BuiltinProblem("bnh", _spec(2, 2, 2, [0, 0], [5, 3]), _bnh, (1.0, 1.0), (0.0, 3.0)),
        BuiltinProblem("srn", _spec(2, 2, 2, [-20, -20], [20, 20]), _srn, (0.0, 5.0), (0.0, 0.0)),
        BuiltinProblem("tnk", _spec(2, 2, 2, [0, 0], [np.pi, np.pi]), _tnk, (0.9, 0.9), (0.5, 0.5)),
        BuiltinProblem("osy", _spec(6, 2, 6, [0, 0, 1, 0, 1, 0], [10, 10, 5, 6, 5, 10]), _osy,
                       (2.0, 2.0, 3.0, 1.0, 1.0, 1.0), (0.5, 0.5, 1.0, 5.0, 3.0, 0.0), sampling="random"),
        BuiltinProblem("constr", _spec(2, 2, 2, [0.1, 0], [1, 5]), _constr, (0.8, 1.0), (0.2, 4.0)),
        BuiltinProblem("c2dtlz2", _spec(7, 3, 1, [0] * 7, [1] * 7), _c2dtlz2,
                       (1.0,) + (0.5,) * 6, (0.5, 0.5) + (0.0,) * 5, sampling="random"),
    ]
}


def get_problem(name: str) -> BuiltinProblem:
    try:
        return REGISTRY[name.lower()]
    except KeyError:
        raise ConfigurationError(
            f"unknown problem {name!r}; builtin registry: {', '.join(sorted(REGISTRY))}"
        ) from None
