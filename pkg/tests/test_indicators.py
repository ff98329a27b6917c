from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dmultimads.indicators import (FrontApprox, ReferenceData, convergence_curve, convergence_test,
                                   data_profile, emit_convergence_profile, emit_data_profile,
                                   first_solved_evaluation, hypervolume, normalized_hv, transform_T)

from oracles import brute_dominates, hv_inclusion_exclusion

points2 = st.lists(st.tuples(st.floats(0, 0.99), st.floats(0, 0.99)), min_size=1, max_size=10)


def rec(f, h=0.0):
    return SimpleNamespace(f=np.asarray(f, float), h=h)


class TestHypervolume:
    def test_examples(self):
        assert hypervolume([[0, 0]], [1, 1]) == 1.0
        assert hypervolume([[0, 0.5], [0.5, 0]], [1, 1]) == pytest.approx(0.75, abs=1e-15)
        assert hypervolume([[2, 2]], [1, 1]) == 0

    def test_boundary_points_discarded(self):
        assert hypervolume([[1, 0]], [1, 1]) == 0

    def test_empty(self):
        assert hypervolume(np.empty((0, 2)), [1, 1]) == 0

    def test_three_and_four_objectives(self):
        assert hypervolume([[0, 0, 0]], [1, 2, 3]) == pytest.approx(6)
        assert hypervolume([[0.5, 0, 0, 0], [0, 0.5, 0, 0]], [1, 1, 1, 1]) == pytest.approx(0.75)

    def test_too_many_objectives(self):
        with pytest.raises(ValueError):
            hypervolume([[0] * 5], [1] * 5)

    def test_accepts_front_approx(self):
        assert hypervolume(FrontApprox([[0, 0.5], [0.5, 0]]), [1, 1]) == pytest.approx(0.75)

    @given(points2)
    def test_matches_inclusion_exclusion(self, pts):
        assert hypervolume(pts, [1, 1]) == pytest.approx(hv_inclusion_exclusion(pts, [1, 1]), abs=1e-12)

    @given(st.lists(st.tuples(st.floats(0, 0.99), st.floats(0, 0.99), st.floats(0, 0.99)), min_size=1, max_size=7))
    def test_three_objectives_inclusion_exclusion(self, pts):
        assert hypervolume(pts, [1, 1, 1]) == pytest.approx(hv_inclusion_exclusion(pts, [1, 1, 1]), abs=1e-12)

    @given(points2, st.tuples(st.floats(0, 0.99), st.floats(0, 0.99)))
    def test_monotone(self, pts, extra):
        assert hypervolume(pts + [extra], [1, 1]) >= hypervolume(pts, [1, 1]) - 1e-15


class TestTransform:
    def test_examples(self):
        assert transform_T([1, 2], [1, 2], [3, 5]).tolist() == [0, 0]
        assert transform_T([3, 5], [1, 2], [3, 5]).tolist() == [1, 1]
        assert transform_T([1, 7], [0, 5], [2, 5]).tolist() == [0.5, 2]

    # integer grids keep the comparison free of absorption when adding the ideal
    @given(st.tuples(st.integers(-50, 50), st.integers(-50, 50)), st.tuples(st.integers(-50, 50), st.integers(-50, 50)),
           st.tuples(st.integers(-30, 0), st.integers(-30, 0)), st.tuples(st.integers(1, 30), st.integers(1, 30)))
    def test_preserves_dominance(self, a, b, ideal, span):
        nadir = np.add(ideal, span)
        Ta, Tb = transform_T(a, ideal, nadir), transform_T(b, ideal, nadir)
        assert brute_dominates(a, b) == brute_dominates(Ta, Tb)


REF = ReferenceData.from_front([[0, 1], [0.5, 0.5], [1, 0]])


class TestConvergence:
    def test_reference_front_solves(self):
        assert normalized_hv(REF.front, REF) == pytest.approx(1)
        assert convergence_test(REF.front, REF, 1e-6)

    def test_empty_fails(self):
        assert not convergence_test(np.empty((0, 2)), REF, 0.5)

    def test_threshold(self):
        Y = [[0.5, 0.525]]  # 0.5 * 0.475 against 0.25
        assert normalized_hv(Y, REF) == pytest.approx(0.95)
        assert convergence_test(Y, REF, 0.1)
        assert not convergence_test(Y, REF, 0.01)

    def test_degenerate_reference(self):
        with pytest.raises(ValueError):
            normalized_hv([[0, 0]], ReferenceData.from_front([[0, 0]]))

    def test_bad_tolerance(self):
        with pytest.raises(ValueError):
            convergence_test(REF.front, REF, 1.0)


class TestDataProfile:
    def test_all_solved_first(self):
        rows = data_profile({("a", 0): 1, ("b", 0): 1}, {"a": 2, "b": 3}, 3)
        assert rows[0] == (1, 1.0)

    def test_none_solved(self):
        rows = data_profile({("a", 0): None, ("a", 1): None}, {"a": 2}, 4)
        assert [v for _, v in rows] == [0.0] * 4

    def test_half(self):
        solved = {("a", 0): 5, ("a", 1): None, ("b", 0): 40, ("b", 1): None}
        rows = data_profile(solved, {"a": 2, "b": 4}, 10)
        assert rows[-1][1] == 0.5
        assert rows[0][1] == 0.0 and rows[1][1] == 0.25  # 5 <= 2 * 3
        assert all(a[1] <= b[1] for a, b in zip(rows, rows[1:]))

    def test_csv(self, tmp_path):
        emit_data_profile({("a", 0): 1}, {"a": 1}, 2, tmp_path / "dp.csv")
        assert (tmp_path / "dp.csv").read_text() == "k,fraction\n1,1\n2,1\n"


class TestConvergenceProfile:
    def test_infeasible_prefix_is_zero(self):
        hist = [rec([0, 0], 1.0), rec([0, 0], 0.5)]
        assert [v for _, v in convergence_curve(hist, REF)] == [0.0, 0.0]

    def test_reaches_one(self):
        hist = [rec([2, 2], 0.3)] + [rec(p) for p in REF.front.points]
        assert convergence_curve(hist, REF)[-1] == (4, pytest.approx(1.0))

    def test_stride(self, tmp_path):
        hist = [rec(p) for p in REF.front.points]
        rows = emit_convergence_profile(hist, REF, stride=2, path=tmp_path / "cp.csv")
        assert [e for e, _ in rows] == [2, 3]
        assert (tmp_path / "cp.csv").read_text().startswith("evals,normalized_hv\n")

    @given(st.lists(st.tuples(st.floats(-0.5, 1.5), st.floats(-0.5, 1.5), st.booleans()), max_size=30))
    def test_monotone_and_clipped(self, rows):
        hist = [rec((a, b), 0.0 if ok else 1.0) for a, b, ok in rows]
        values = [v for _, v in convergence_curve(hist, REF)]
        assert all(0 <= v <= 1 for v in values)
        assert all(x <= y for x, y in zip(values, values[1:]))

    def test_first_solved(self):
        # the nadir is (1, 1), so only (0.5, 0.5) of the reference has volume
        hist = [rec([2, 2]), rec([0.6, 0.6]), rec([0.5, 0.5])]
        assert first_solved_evaluation(hist, REF, 0.4) == 2
        assert first_solved_evaluation(hist, REF, 1e-9) == 3
        assert first_solved_evaluation(hist[:1], REF, 0.5) is None
