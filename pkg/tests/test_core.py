import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dmultimads.core import (INF, Cache, ConfigurationError, Evaluation, IncumbentEntry, ProblemSpec,
                             Status, cache_probe, compute_h, dominates_feasible, dominates_infeasible,
                             hidden_failure, make_evaluation, nondominated_indices, pareto_filter)

from oracles import brute_nondominated


def feas(*f):
    return Evaluation(np.zeros(1), f, [], 0.0)


def infeas(f, h):
    return Evaluation(np.zeros(1), f, [], h)


SPEC = ProblemSpec(2, 2, 1, [0, 0], [1, 1])


class TestComputeH:
    def test_feasible_is_zero(self):
        assert compute_h([-1, -2]) == 0.0

    def test_sum_of_squared_positive_parts(self):
        assert compute_h([0.5, -1, 2]) == 4.25

    def test_outside_bounds_is_infinite(self):
        assert compute_h([-1], within_bounds=False) == INF

    def test_infinite_constraint(self):
        assert compute_h([INF, -1]) == INF

    def test_no_constraints(self):
        assert compute_h([]) == 0.0

    @given(st.lists(st.floats(-1e6, 1e6), max_size=6))
    def test_nonnegative_and_zero_iff_feasible(self, c):
        h = compute_h(c)
        assert h >= 0
        assert (h == 0) == all(v <= 0 or v * v == 0 for v in c)


class TestDominance:
    def test_feasible_examples(self):
        assert dominates_feasible(feas(1, 2), feas(2, 2))
        assert not dominates_feasible(feas(1, 2), feas(1, 2))
        assert not dominates_feasible(feas(1, 3), feas(2, 2))

    def test_feasible_precondition(self):
        with pytest.raises(ValueError):
            dominates_feasible(infeas((1, 2), 0.5), feas(2, 2))

    def test_infeasible_examples(self):
        assert dominates_infeasible(infeas((1, 2), 0.5), infeas((1, 2), 0.9))
        assert not dominates_infeasible(infeas((1, 2), 0.5), infeas((0, 3), 0.9))
        a = infeas((1, 2), 0.5)
        assert not dominates_infeasible(a, a)

    def test_infeasible_precondition(self):
        with pytest.raises(ValueError):
            dominates_infeasible(feas(1, 2), infeas((1, 2), 0.5))
        with pytest.raises(ValueError):
            dominates_infeasible(infeas((1, 2), INF), infeas((1, 2), 0.5))

    def test_single_objective_reduces_to_pairwise_f_h(self):
        a, b = infeas((1.0,), 0.5), infeas((2.0,), 0.5)
        assert dominates_infeasible(a, b)
        assert not dominates_infeasible(infeas((1.0,), 0.9), infeas((2.0,), 0.5))

    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=3, max_size=3))
    def test_strict_partial_order(self, rows):
        a, b, c = (feas(*r) for r in rows)
        assert not dominates_feasible(a, a)
        assert not (dominates_feasible(a, b) and dominates_feasible(b, a))
        if dominates_feasible(a, b) and dominates_feasible(b, c):
            assert dominates_feasible(a, c)

    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(1, 3)), min_size=3, max_size=3))
    def test_infeasible_strict_partial_order(self, rows):
        a, b, c = (infeas(r[:2], r[2] / 4) for r in rows)
        assert not dominates_infeasible(a, a)
        assert not (dominates_infeasible(a, b) and dominates_infeasible(b, a))
        if dominates_infeasible(a, b) and dominates_infeasible(b, c):
            assert dominates_infeasible(a, c)


class TestParetoFilter:
    def test_example(self):
        pts = [feas(1, 2), feas(2, 1), feas(2, 2)]
        kept = pareto_filter(pts)
        assert kept == pts[:2]

    def test_single_and_empty(self):
        p = feas(1, 1)
        assert pareto_filter([p]) == [p]
        assert pareto_filter([]) == []

    def test_duplicates_are_kept_in_insertion_order(self):
        pts = [feas(1, 1), feas(0, 3), feas(1, 1)]
        assert pareto_filter(pts) == pts

    def test_infeasible_relation_uses_h(self):
        pts = [infeas((1, 2), 0.9), infeas((1, 2), 0.5)]
        assert pareto_filter(pts, "infeasible") == [pts[1]]

    def test_precondition(self):
        with pytest.raises(ValueError):
            pareto_filter([infeas((1, 1), 0.5)], "feasible")

    @given(st.integers(1, 4).flatmap(
        lambda m: st.lists(st.lists(st.integers(0, 5), min_size=m, max_size=m), min_size=1, max_size=30)))
    def test_matches_brute_force(self, rows):
        assert nondominated_indices(np.array(rows, float)) == brute_nondominated(rows)

    @given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=1, max_size=30))
    def test_discarded_are_dominated_by_kept(self, rows):
        kept = set(nondominated_indices(np.array(rows, float)))
        for i, r in enumerate(rows):
            if i not in kept:
                assert any(all(a <= b for a, b in zip(rows[k], r)) and rows[k] != r for k in kept)


class TestEvaluation:
    def test_nan_objective_is_hidden_failure(self):
        e = make_evaluation([0.5, 0.5], [math.nan, 1.0], [-1.0], SPEC)
        assert e.status is Status.HIDDEN_FAILURE and e.h == INF and np.all(e.f == INF)

    def test_nan_constraint_gives_infinite_h(self):
        e = make_evaluation([0.5, 0.5], [1.0, 1.0], [math.nan], SPEC)
        assert e.h == INF

    def test_outside_bounds_gives_infinite_h(self):
        assert make_evaluation([2.0, 0.5], [1.0, 1.0], [-1.0], SPEC).h == INF

    def test_wrong_arity_is_hidden_failure(self):
        assert make_evaluation([0.5, 0.5], [1.0], [-1.0], SPEC).status is Status.HIDDEN_FAILURE

    def test_immutable(self):
        e = make_evaluation([0.5, 0.5], [1.0, 2.0], [-1.0], SPEC)
        with pytest.raises(ValueError):
            e.f[0] = 3.0

    def test_hidden_failure_record(self):
        e = hidden_failure([0.1, 0.2], 2, 1)
        assert e.h == INF and np.all(e.f == INF) and not e.feasible

    def test_incumbent_frame_positive(self):
        with pytest.raises(ValueError):
            IncumbentEntry(feas(1, 1), 0.0)


class TestProblemSpec:
    def test_rejects_crossed_bounds(self):
        with pytest.raises(ConfigurationError):
            ProblemSpec(1, 1, 0, [1], [0])

    def test_scale(self):
        spec = ProblemSpec(3, 1, 0, [0, -INF, 2], [5, 0, 2])
        assert spec.scale().tolist() == [0.5, 1.0, 1.0]


class TestCache:
    def test_empty_probe(self):
        assert cache_probe(Cache(), [0.0, 0.0]) is None

    def test_round_trip(self):
        cache = Cache()
        e = make_evaluation([0.25, 0.5], [1, 2], [-1], SPEC)
        cache.insert(e)
        assert cache_probe(cache, [0.25, 0.5]) is e

    def test_exact_match_only(self):
        cache = Cache()
        cache.insert(make_evaluation([0.25, 0.5], [1, 2], [-1], SPEC))
        assert cache_probe(cache, [0.25 + 1e-16, 0.5]) is None or 0.25 + 1e-16 == 0.25
        assert cache_probe(cache, [np.nextafter(0.25, 1.0), 0.5]) is None

    def test_duplicate_insert_rejected(self):
        cache = Cache()
        cache.insert(make_evaluation([0.25, 0.5], [1, 2], [-1], SPEC))
        with pytest.raises(KeyError):
            cache.insert(make_evaluation([0.25, 0.5], [1, 2], [-1], SPEC))
