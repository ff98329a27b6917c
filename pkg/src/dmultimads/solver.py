"""The four run modes (EB, TEB, PB, Penalty) built on one iteration loop.

Every variant drives the same loop. What differs is the *view*: a function
that turns the raw blackbox record into the record the loop reasons with.

* PB sees the raw record.
* EB sends every infeasible point to f = h = +inf.
* TEB phase 1 minimises h as a single unconstrained objective.
* Penalty folds the constraints into the objectives and drops them.

The cache, history, budget counter, iteration counter and random stream are
shared by all phases of a run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .barrier import (
    BarrierState,
    IterationOutcome,
    NondominatedArchive,
    assign_trial_frame_size,
    classify_iteration,
    dominates_center,
    refresh_lists,
    update_h_max,
)
from .core import (
    INF,
    Cache,
    ConfigurationError,
    Evaluation,
    IncumbentEntry,
    Status,
    pareto_filter,
)
from .indicators import FrontApprox, write_csv
from .mesh import generate_poll_directions, mesh_size_of, on_mesh
from .selection import IterateList, select_frame_centers

VARIANTS = ("eb", "teb", "pb", "penalty")

BUDGET = "Budget"
MESH_TOL = "MeshTol"
_FEASIBLE_FOUND = "Feasible"


class InvariantError(AssertionError):
    """A debug-mode consistency check failed."""


@dataclass(frozen=True)
class SolverConfig:
    variant: str = "pb"
    budget: int = 1000
    tau: float = 0.5
    w_plus: int = 1
    rho: float = 0.1
    delta0: float = 1.0
    mesh_tol: float = 1e-9
    eps_penalty: float = 1e-3
    rng_seed: int = 0
    opportunistic: bool = True
    speculative: bool = True
    debug: bool = False

    def __post_init__(self):
        variant = str(self.variant).lower()
        object.__setattr__(self, "variant", variant)
        if variant not in VARIANTS:
            raise ConfigurationError(f"unknown variant {self.variant!r}; expected one of {', '.join(VARIANTS)}")
        if int(self.budget) != self.budget or self.budget < 1:
            raise ConfigurationError("budget must be a positive integer")
        if not 0.0 < self.tau < 1.0:
            raise ConfigurationError("tau must lie in (0, 1)")
        if int(self.w_plus) != self.w_plus or self.w_plus < 0:
            raise ConfigurationError("w_plus must be a nonnegative integer")
        for name in ("rho", "delta0", "mesh_tol", "eps_penalty"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ConfigurationError(f"{name} must be positive and finite")
        if int(self.rng_seed) != self.rng_seed or self.rng_seed < 0:
            raise ConfigurationError("rng_seed must be a nonnegative integer")


@dataclass
class HistoryRecord:
    eval_index: int
    iteration: int
    kind: str
    x: np.ndarray
    f: np.ndarray
    c: np.ndarray
    h: float
    status: Status


@dataclass
class RunResult:
    pareto_approx: list[Evaluation]
    infeasible_front: list[Evaluation]
    history: list[HistoryRecord]
    eval_count: int
    stop_reason: str
    outcomes: list[IterationOutcome] = field(default_factory=list)
    h_max_trace: list[float] = field(default_factory=list)
    phase1_evals: int | None = None  # evaluations spent before the first feasible point (TEB)

    @property
    def front(self) -> FrontApprox:
        if not self.pareto_approx:
            m = self.history[0].f.size if self.history else 0
            return FrontApprox(np.empty((0, m)))
        return FrontApprox(np.vstack([e.f for e in self.pareto_approx]))


View = Callable[[Evaluation], Evaluation]


def _identity(e: Evaluation) -> Evaluation:
    return e


def _eb_view(e: Evaluation) -> Evaluation:
    if e.h == 0.0:
        return e
    return Evaluation(e.x, np.full(e.f.size, INF), np.full(e.c.size, INF), INF, e.status)


def _violation_view(e: Evaluation) -> Evaluation:
    if e.h == INF:
        return Evaluation(e.x, [INF], [], INF, e.status)
    return Evaluation(e.x, [e.h], [], 0.0, e.status)


def penalized_objectives(f, c, eps: float) -> np.ndarray:
    """Objectives plus the scaled sum of positive constraint parts."""
    c = np.asarray(c, dtype=float)
    return np.asarray(f, dtype=float) + np.sum(np.maximum(c, 0.0)) / eps


def _penalty_view(eps: float) -> View:
    def view(e: Evaluation) -> Evaluation:
        if e.h == INF:
            return Evaluation(e.x, np.full(e.f.size, INF), [], INF, e.status)
        return Evaluation(e.x, penalized_objectives(e.f, e.c, eps), [], 0.0, e.status)
    return view


@dataclass
class _Run:
    """State shared by every phase of one run."""

    problem: object
    config: SolverConfig
    cache: Cache = field(default_factory=Cache)
    history: list[HistoryRecord] = field(default_factory=list)
    iteration: int = 0
    outcomes: list[IterationOutcome] = field(default_factory=list)
    h_max_trace: list[float] = field(default_factory=list)

    def __post_init__(self):
        self.spec = self.problem.spec
        self.scale = self.spec.scale()
        self.rng = np.random.default_rng(self.config.rng_seed)

    @property
    def eval_count(self) -> int:
        return len(self.history)

    @property
    def exhausted(self) -> bool:
        return self.eval_count >= self.config.budget

    def evaluate(self, x: np.ndarray, kind: str) -> Evaluation | None:
        """Raw evaluation of a new point; None when skipped (out of bounds, cached, no budget)."""
        if self.exhausted or not self.spec.within_bounds(x) or self.cache.probe(x) is not None:
            return None
        e = self.problem.evaluate(x)
        self.cache.insert(e)
        self.history.append(HistoryRecord(self.eval_count + 1, self.iteration, kind,
                                          e.x, e.f, e.c, e.h, e.status))
        return e


@dataclass
class _Trial:
    raw: Evaluation
    seen: Evaluation
    center: IncumbentEntry
    direction: np.ndarray
    delta_mesh: float


def _evaluate_starts(run: _Run, starts: Sequence, view: View) -> list[IncumbentEntry]:
    pts = [np.asarray(s, dtype=float).reshape(-1) for s in starts]
    if not pts:
        raise ConfigurationError("no starting point given")
    if any(p.shape != (run.spec.n,) for p in pts):
        raise ConfigurationError(f"starting points must have length {run.spec.n}")
    inside = [p for p in pts if run.spec.within_bounds(p)]
    if not inside:
        raise ConfigurationError("no starting point lies within the bounds")
    raws = []
    for p in inside:
        e = run.evaluate(p, "init")
        if e is None:
            e = run.cache.probe(p)
            if e is None:
                break  # budget spent
            continue  # duplicate start
        raws.append(e)
    if raws and all(e.status is Status.HIDDEN_FAILURE for e in raws):
        raise ConfigurationError("every starting point failed to evaluate")
    return [IncumbentEntry(view(e), run.config.delta0) for e in raws]


def _pairwise_nondominated(rows: np.ndarray) -> bool:
    if rows.shape[0] < 2:
        return True
    if rows.shape[1] == 2:
        # sorted by (r1, r2), distinct neighbours need a strict drop in r2
        r = np.unique(rows, axis=0)
        return bool(np.all(np.diff(r[:, 1]) < 0))
    A = rows[None, :, :]
    X = rows[:, None, :]
    return not np.any(np.all(A <= X, axis=2) & np.any(A < X, axis=2))


def _check_invariants(state: BarrierState, prev_h_max: float, trials: Sequence[_Trial], scale) -> None:
    if state.h_max > prev_h_max:
        raise InvariantError(f"h_max increased from {prev_h_max} to {state.h_max}")
    for e in state.L_I:
        if not 0.0 < e.eval.h <= state.h_max:
            raise InvariantError(f"infeasible incumbent with h={e.eval.h} outside (0, {state.h_max}]")
    if len(state.L_F) and not _pairwise_nondominated(state.L_F.objectives):
        raise InvariantError("feasible iterate list holds a dominated point")
    if len(state.L_I):
        rows = np.column_stack([state.L_I.objectives, state.L_I.violations])
        if not _pairwise_nondominated(rows):
            raise InvariantError("infeasible iterate list holds a dominated point")
    for t in trials:
        if not on_mesh(t.raw.x, t.center.eval.x, t.delta_mesh, scale):
            raise InvariantError(f"trial point {t.raw.x.tolist()} is off the mesh")


def speculative_search(last_success: Evaluation | np.ndarray, direction, delta_mesh: float,
                       scale=None) -> np.ndarray:
    """One further step of length twice the successful mesh step along its direction."""
    x = last_success.x if isinstance(last_success, Evaluation) else np.asarray(last_success, dtype=float)
    step = 2.0 * delta_mesh * np.asarray(direction, dtype=float)
    if scale is not None:
        step = step * np.asarray(scale, dtype=float)
    return x + step


def _center_converged(center: IncumbentEntry, scale: np.ndarray, tol: float) -> bool:
    return float(np.min(scale)) * mesh_size_of(center.delta_frame) < tol


def _replace(lst: IterateList, old: IncumbentEntry, new: IncumbentEntry) -> IterateList:
    return IterateList.with_arrays((new if e is old else e for e in lst.entries), lst.kind,
                                   lst.objectives, lst.violations)


def _iterate(run: _Run, view: View, initial: Sequence[IncumbentEntry],
             stop_on_feasible: bool = False) -> tuple[BarrierState, str]:
    """Main loop. Returns the final lists and the stop reason."""
    cfg = run.config
    m_seen = initial[0].eval.f.size if initial else run.spec.m
    state = refresh_lists(BarrierState(), list(initial))
    archive = NondominatedArchive(m_seen + 1)  # nondominated infeasible points seen so far
    for e in initial:
        if 0.0 < e.eval.h < INF:
            archive.insert(np.append(e.eval.f, e.eval.h), e.eval)
    if not run.h_max_trace:
        run.h_max_trace.append(state.h_max)
    if stop_on_feasible and any(rec.h == 0.0 for rec in run.history):
        return state, _FEASIBLE_FOUND

    while True:
        if run.exhausted:
            return state, BUDGET
        if not len(state.L_F) and not len(state.L_I):
            raise RuntimeError("both iterate lists are empty")
        choice = select_frame_centers(state.L_F, state.L_I, cfg.tau, cfg.w_plus, cfg.rho)
        centers = [c for c in (choice.primary, choice.secondary) if c is not None]
        active = [not _center_converged(c, run.scale, cfg.mesh_tol) for c in centers]
        if not any(active):
            return state, MESH_TOL
        x_F = next((c for c in centers if c.eval.h == 0.0), None)
        x_I = next((c for c in centers if c.eval.h > 0.0), None)
        seeds = [int(run.rng.integers(2**32)) for _ in centers]
        run.iteration += 1
        first_record = run.eval_count
        trials: list[_Trial] = []
        dominating = False

        def attempt(x, center, direction, delta_mesh) -> bool:
            raw = run.evaluate(x, "")
            if raw is None:
                return False
            seen = view(raw)
            trials.append(_Trial(raw, seen, center, np.asarray(direction), delta_mesh))
            return dominates_center(seen, x_F, x_I)

        if cfg.speculative:
            for c, live in zip(centers, active):
                if c.direction is None or not live:
                    continue
                x = speculative_search(c.eval, c.direction, c.gen_delta_mesh, run.scale)
                if attempt(x, c, 2 * np.asarray(c.direction), c.gen_delta_mesh):
                    dominating = True
                    if cfg.opportunistic:
                        break

        if not (dominating and cfg.opportunistic):
            for rank, (c, seed, live) in enumerate(zip(centers, seeds, active)):
                if not live:
                    continue  # this center's mesh is already below the tolerance
                delta_mesh = mesh_size_of(c.delta_frame)
                count = run.spec.n + 1 if rank == 0 else 2
                dirs = generate_poll_directions(run.spec.n, c.delta_frame, delta_mesh, seed, count)
                stop = False
                for d in dirs:
                    x = c.eval.x + delta_mesh * run.scale * d
                    if attempt(x, c, d, delta_mesh):
                        dominating = True
                        if cfg.opportunistic:
                            stop = True
                            break
                if stop or run.exhausted:
                    break

        seen_trials = [t.seen for t in trials]
        outcome = classify_iteration(seen_trials, x_F, x_I)
        for rec in run.history[first_record:]:
            rec.kind = outcome.value

        F_now, I_now = state.L_F, state.L_I
        additions = []
        for t in trials:
            delta = assign_trial_frame_size(t.seen, F_now, I_now, t.center.delta_frame, cfg.tau)
            if delta > t.center.delta_frame:
                additions.append(IncumbentEntry(t.seen, delta, tuple(int(v) for v in t.direction), t.delta_mesh))
            else:
                additions.append(IncumbentEntry(t.seen, delta))
            if 0.0 < t.seen.h < INF:
                archive.insert(np.append(t.seen.f, t.seen.h), t.seen)

        h_max = update_h_max((e.h for e in archive.items), [e.eval for e in I_now], x_I, outcome, state.h_max)
        L_F, L_I = state.L_F, state.L_I
        if outcome is IterationOutcome.UNSUCCESSFUL:
            for c, live in zip(centers, active):
                if not live:
                    continue
                shrunk = IncumbentEntry(c.eval, cfg.tau * c.delta_frame)
                if c.eval.h == 0.0:
                    L_F = _replace(L_F, c, shrunk)
                else:
                    L_I = _replace(L_I, c, shrunk)
        prev_h_max = state.h_max
        state = refresh_lists(BarrierState(h_max, L_F, L_I), additions)
        run.outcomes.append(outcome)
        run.h_max_trace.append(state.h_max)
        if cfg.debug:
            _check_invariants(state, prev_h_max, trials, run.scale)
        if stop_on_feasible and any(t.raw.h == 0.0 for t in trials):
            return state, _FEASIBLE_FOUND


def _truly_feasible_front(run: _Run) -> list[Evaluation]:
    feasible = [e for e in run.cache if e.h == 0.0]
    return pareto_filter(feasible, "feasible")


def _raw_of(run: _Run, entries) -> list[Evaluation]:
    return [run.cache.probe(e.eval.x) for e in entries]


def _finish(run: _Run, infeasible: list[Evaluation], stop: str, phase1: int | None = None) -> RunResult:
    return RunResult(
        pareto_approx=_truly_feasible_front(run),
        infeasible_front=infeasible,
        history=run.history,
        eval_count=run.eval_count,
        stop_reason=stop,
        outcomes=run.outcomes,
        h_max_trace=run.h_max_trace,
        phase1_evals=phase1,
    )


def _require(config: SolverConfig, variant: str) -> None:
    if config.variant != variant:
        raise ConfigurationError(f"config variant is {config.variant!r}, expected {variant!r}")


def run_pb(problem, config: SolverConfig, starts: Sequence) -> RunResult:
    _require(config, "pb")
    run = _Run(problem, config)
    initial = _evaluate_starts(run, starts, _identity)
    state, stop = _iterate(run, _identity, initial)
    return _finish(run, _raw_of(run, state.L_I), stop)


def _eb(run: _Run, view: View, initial: Sequence[IncumbentEntry]) -> RunResult:
    if not any(e.eval.h == 0.0 for e in initial):
        raise ConfigurationError("the extreme barrier needs a feasible starting point")
    state, stop = _iterate(run, view, initial)
    return _finish(run, [], stop)


def run_eb(problem, config: SolverConfig, starts: Sequence) -> RunResult:
    _require(config, "eb")
    run = _Run(problem, config)
    return _eb(run, _eb_view, _evaluate_starts(run, starts, _eb_view))


def _teb(run: _Run, starts: Sequence, view_phase1: View, view_phase2: View) -> RunResult:
    initial = _evaluate_starts(run, starts, _identity)
    raw_starts = [e.eval for e in initial]
    if any(e.h == 0.0 for e in raw_starts) or run.exhausted:
        if not any(e.h == 0.0 for e in raw_starts):
            return _finish(run, [e for e in raw_starts if e.h < INF], BUDGET, run.eval_count)
        return _eb(run, view_phase2, [IncumbentEntry(view_phase2(e), run.config.delta0) for e in raw_starts])

    phase1 = [IncumbentEntry(view_phase1(e), run.config.delta0) for e in raw_starts]
    state, stop = _iterate(run, view_phase1, phase1, stop_on_feasible=True)
    spent = run.eval_count
    if stop != _FEASIBLE_FOUND:
        return _finish(run, _raw_of(run, state.L_F), stop, spent)
    carried = []
    for entry in state.L_F:
        raw = run.cache.probe(entry.eval.x)
        if raw.h == 0.0:
            carried.append(IncumbentEntry(view_phase2(raw), entry.delta_frame))
    result = _eb(run, view_phase2, carried)
    result.phase1_evals = spent
    return result


def run_teb(problem, config: SolverConfig, starts: Sequence) -> RunResult:
    _require(config, "teb")
    run = _Run(problem, config)
    return _teb(run, starts, _violation_view, _eb_view)


def run_penalty(problem, config: SolverConfig, starts: Sequence) -> RunResult:
    _require(config, "penalty")
    run = _Run(problem, config)
    view = _penalty_view(config.eps_penalty)
    # every evaluable point is feasible for the penalized problem, so the
    # two-phase scheme reduces to the barrier run on the penalized objectives
    return _eb(run, view, _evaluate_starts(run, starts, view))


_RUNNERS = {"pb": run_pb, "eb": run_eb, "teb": run_teb, "penalty": run_penalty}


def solve(problem, config: SolverConfig, starts: Sequence | None = None) -> RunResult:
    """Run the configured variant; builtin problems supply default starts."""
    if starts is None:
        if not hasattr(problem, "default_starts"):
            raise ConfigurationError("starting points are required for this problem")
        starts = problem.default_starts(config.variant)
    return _RUNNERS[config.variant](problem, config, starts)


def history_rows(history: Sequence[HistoryRecord]):
    for r in history:
        yield [r.eval_index, r.iteration, r.kind, *r.x, *r.f, *r.c, r.h]


def history_header(n: int, m: int, j: int) -> list[str]:
    return (["eval_index", "iteration", "kind"] + [f"x_{i + 1}" for i in range(n)]
            + [f"f_{i + 1}" for i in range(m)] + [f"c_{i + 1}" for i in range(j)] + ["h"])


def write_history_csv(path, result: RunResult, spec) -> None:
    write_csv(path, history_header(spec.n, spec.m, spec.j_count), history_rows(result.history))
