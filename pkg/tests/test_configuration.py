import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
import hypothesis.strategies as st

from loggas.configuration import (
    PointConfiguration,
    Window,
    count_in,
    discrepancy,
    empty_configuration,
    exterior,
    make_configuration,
    read_jsonl,
    restrict,
    to_jsonl,
    w1_distance,
    w1_distance_bruteforce,
)
from loggas.errors import CardinalityMismatch, DomainError, DuplicatePoint, NonFinite, TooLarge


coords = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False, allow_infinity=False)


def configs(size):
    return st.lists(coords, min_size=size, max_size=size, unique=True).map(make_configuration)


same_size_pair = st.integers(min_value=0, max_value=6).flatmap(lambda k: st.tuples(configs(k), configs(k)))
same_size_triple = st.integers(min_value=0, max_value=6).flatmap(lambda k: st.tuples(configs(k), configs(k), configs(k)))


class TestWindow:
    def test_centered(self):
        w = Window.centered(4.0)
        assert (w.lo, w.hi) == (-2.0, 2.0)
        assert w.length == 4.0
        assert w.center == 0.0

    def test_empty_window_rejected(self):
        with pytest.raises(DomainError):
            Window(1.0, 1.0)
        with pytest.raises(DomainError):
            Window(2.0, -1.0)

    def test_infinite_bound_rejected(self):
        with pytest.raises(DomainError):
            Window(-math.inf, 0.0)

    def test_closed_membership(self):
        w = Window(-1.0, 1.0)
        assert w.contains(-1.0) and w.contains(1.0)
        assert not w.contains(1.0000001)

    def test_distance(self):
        w = Window(-1.0, 1.0)
        assert np.allclose(w.distance(np.array([0.0, 3.0, -4.0])), [0.0, 2.0, 3.0])


class TestMakeConfiguration:
    def test_sorted(self):
        gamma = make_configuration([3.0, -1.0, 2.0])
        assert gamma.points.tolist() == [-1.0, 2.0, 3.0]

    def test_duplicate(self):
        with pytest.raises(DuplicatePoint):
            make_configuration([1.0, 2.0, 1.0])

    def test_non_finite(self):
        with pytest.raises(NonFinite):
            make_configuration([0.0, float("nan")])
        with pytest.raises(NonFinite):
            make_configuration([float("inf")])

    def test_read_only(self):
        gamma = make_configuration([0.0, 1.0])
        with pytest.raises(ValueError):
            gamma.points[0] = 5.0

    def test_union_duplicate(self):
        with pytest.raises(DuplicatePoint):
            make_configuration([0.0]).union(make_configuration([0.0, 1.0]))

    def test_empty(self):
        assert empty_configuration().count == 0
        assert len(make_configuration([])) == 0


class TestRestriction:
    def test_closed_endpoints(self):
        gamma = make_configuration([-1.0, 0.0, 1.0, 2.0])
        assert restrict(gamma, Window(-1.0, 1.0)).points.tolist() == [-1.0, 0.0, 1.0]
        assert count_in(gamma, Window(-1.0, 1.0)) == 3

    def test_exterior(self):
        gamma = make_configuration([-5.0, -1.5, 0.0, 1.5, 5.0])
        ext = exterior(gamma, Window(-1.0, 1.0), Window(-2.0, 2.0))
        assert ext.points.tolist() == [-1.5, 1.5]

    def test_discrepancy(self):
        gamma = make_configuration([0.1, 0.2, 0.3])
        d = discrepancy(gamma, Window(0.0, 2.0))
        assert d.count == 3
        assert d.value == pytest.approx(1.0)

    @given(configs(8), st.floats(min_value=-60, max_value=0), st.floats(min_value=0.1, max_value=60))
    def test_restriction_count_matches(self, gamma, lo, width):
        w = Window(lo, lo + width)
        assert restrict(gamma, w).count == count_in(gamma, w) == int(np.sum(w.mask(gamma.points)))

    @given(configs(8), st.floats(min_value=-60, max_value=0), st.floats(min_value=0.1, max_value=60))
    def test_restriction_idempotent(self, gamma, lo, width):
        w = Window(lo, lo + width)
        once = restrict(gamma, w)
        assert restrict(once, w) == once

    @given(
        configs(8),
        st.floats(min_value=-60, max_value=0),
        st.floats(min_value=0.1, max_value=30),
        st.floats(min_value=0.1, max_value=30),
    )
    def test_discrepancy_adds_over_adjacent_windows(self, gamma, lo, left, right):
        cut = lo + left
        assume(not np.any(gamma.points == cut))
        a, b, whole = Window(lo, cut), Window(cut, cut + right), Window(lo, cut + right)
        da, db, dw = discrepancy(gamma, a), discrepancy(gamma, b), discrepancy(gamma, whole)
        assert da.count + db.count == dw.count
        assert da.value + db.value == pytest.approx(dw.value, abs=1e-9)


class TestW1:
    def test_example(self):
        a = make_configuration([0.0, 1.0])
        b = make_configuration([0.5, 3.0])
        assert w1_distance(a, b) == pytest.approx(2.5)

    def test_cardinality_mismatch(self):
        with pytest.raises(CardinalityMismatch):
            w1_distance(make_configuration([0.0]), make_configuration([0.0, 1.0]))

    def test_bruteforce_limit(self):
        a = make_configuration(np.arange(9.0))
        with pytest.raises(TooLarge):
            w1_distance_bruteforce(a, a)

    def test_empty(self):
        assert w1_distance(empty_configuration(), empty_configuration()) == 0.0

    @given(same_size_pair)
    def test_matches_bruteforce(self, pair):
        a, b = pair
        assert w1_distance(a, b) == pytest.approx(w1_distance_bruteforce(a, b), rel=1e-12, abs=1e-12)

    @given(same_size_pair)
    def test_symmetric_and_nonnegative(self, pair):
        a, b = pair
        assert w1_distance(a, b) == w1_distance(b, a) >= 0.0

    @given(configs(5))
    def test_zero_on_identical(self, a):
        assert w1_distance(a, a) == 0.0

    @settings(max_examples=50)
    @given(same_size_triple)
    def test_triangle_inequality(self, triple):
        a, b, c = triple
        assert w1_distance(a, c) <= w1_distance(a, b) + w1_distance(b, c) + 1e-9


class TestSerialization:
    def test_json_ascending(self):
        gamma = make_configuration([2.0, -1.0])
        assert gamma.to_json() == "[-1.0, 2.0]"
        assert PointConfiguration.from_json(gamma.to_json()) == gamma

    def test_jsonl_lines(self):
        configs_ = [make_configuration([0.0, 1.5]), empty_configuration(), make_configuration([-2.0])]
        text = to_jsonl(configs_)
        assert text.count("\n") == 3
        assert read_jsonl(text.splitlines()) == configs_

    def test_from_json_duplicate(self):
        with pytest.raises(DuplicatePoint):
            PointConfiguration.from_json("[1.0, 1.0]")
