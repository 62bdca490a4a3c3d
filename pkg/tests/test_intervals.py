"""
Unit tests for finite unions of circular intervals and attractor descriptors
"""

import pytest
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.errors import ValidationError
from src.exact import INF, ONE, TAU, ZERO, QNum
from src.intervals import (
    FiniteAttractor, IntervalUnion, ParabolicTail, arc_sample, gap_bound,
    rational_between,
)
from src.modular import L, Mat


def arc(lo, hi):
    return IntervalUnion.from_arc(QNum.coerce(lo), QNum.coerce(hi))


class TestCanonicalUnions:
    """Abutting arcs merge, arcs through infinity and zero wrap"""

    def test_glue(self):
        a = arc(-3, QNum(-5, 0, 2))
        b = arc(QNum(-5, 0, 2), -2)
        assert a | b == arc(-3, -2)

    def test_through_infinity(self):
        u = arc(INF, -2)
        assert u.contains(QNum(-3)) and u.contains(INF)
        assert not u.contains(QNum(-1))
        assert not u.contains(QNum(5))

    def test_wrap_through_zero(self):
        u = arc(1, 0)
        for x in (INF, QNum(-5), QNum(2), ZERO, ONE):
            assert u.contains(x)
        assert not u.contains(QNum.rational(1, 2))
        assert str(u) == "[1, 0]"

    def test_point(self):
        p = IntervalUnion.point(QNum.rational(1, 3))
        assert p.isolated_points() == [QNum.rational(1, 3)]
        assert p.interior_points() == []


class TestSetAlgebra:
    """Union, intersection, closure of differences, complement"""

    def test_intersection(self):
        assert arc(0, 2) & arc(1, INF) == arc(1, 2)

    def test_difference_is_closed(self):
        assert arc(0, 2) - arc(1, 2) == arc(0, 1)

    def test_complement(self):
        assert arc(0, 1).complement() == arc(1, 0)
        assert IntervalUnion.empty().complement().is_full
        assert IntervalUnion.full().complement().is_empty

    def test_subset(self):
        assert arc(QNum.rational(1, 3), QNum.rational(1, 2)).issubset(arc(0, 1))
        assert not arc(0, 2).issubset(arc(0, 1))

    def test_touching_arcs_meet_in_a_point(self):
        meet = arc(0, 1) & arc(1, 2)
        assert meet.isolated_points() == [ONE]


class TestImages:
    """Exact images under Mobius maps"""

    def test_image_through_infinity(self):
        assert arc(INF, 0).image(L.inverse()) == arc(-1, 0)

    def test_orientation_reversing(self):
        flip = Mat(0, 1, 1, 0)
        assert arc(2, 3).image(flip) == arc(QNum.rational(1, 3), QNum.rational(1, 2))

    def test_image_of_empty(self):
        assert IntervalUnion.empty().image(L).is_empty


class TestSampling:
    """Simplest rationals between endpoints"""

    def test_rational_between(self):
        x = rational_between(QNum.rational(1, 3), QNum.rational(1, 2))
        assert x == QNum.rational(2, 5)

    def test_integer_gap(self):
        assert rational_between(QNum.rational(1, 2), QNum.rational(7, 2)) == QNum(1)

    def test_quadratic_endpoints(self):
        phi = QNum(-1, 1, 2, 5)
        x = rational_between(QNum.rational(3, 5), phi)
        assert QNum.rational(3, 5) < x < phi

    def test_arc_sample_inside(self):
        x = arc_sample(INF, QNum(-2))
        assert arc(INF, -2).contains(x)
        assert x != INF and x != QNum(-2)

    def test_gap_bound(self):
        assert gap_bound(arc(0, 1), arc(0, 1)) == ZERO
        assert gap_bound(arc(0, 1), arc(0, INF)) > ZERO


class TestDescriptors:
    """Finite attractors and parabolic tails"""

    def tail(self):
        return ParabolicTail(L, arc(INF, -2), ZERO, "o")

    def test_finite(self):
        d = FiniteAttractor(arc(0, 1))
        assert d.contains(QNum.rational(1, 2))
        assert d.expand(10) == arc(0, 1)

    def test_tail_membership(self):
        t = self.tail()
        assert t.contains(ZERO)
        assert t.contains(QNum(-3))
        assert t.contains(QNum.rational(3, 5))
        assert not t.contains(QNum.rational(7, 10))
        assert not t.contains(QNum(-1))
        assert not t.contains(QNum(3))

    def test_tail_deep_point(self):
        t = self.tail()
        assert t.contains(QNum.rational(1, 1000))
        assert t.iterate_index(QNum.rational(1, 1000)) == 1000

    def test_tail_expand(self):
        expected = arc(INF, -2) | arc(1, 2) | IntervalUnion.point(ZERO)
        assert self.tail().expand(2) == expected

    def test_tail_image(self):
        moved = self.tail().image(L.inverse())
        assert moved.limit == ZERO
        assert moved.contains(QNum(-5))

    def test_tail_needs_parabolic_map(self):
        with pytest.raises(ValidationError):
            ParabolicTail(Mat(2, 1, 1, 1), arc(INF, -2), ZERO)

    def test_tail_base_excludes_limit(self):
        with pytest.raises(ValidationError):
            ParabolicTail(L, arc(-1, 1), ZERO)

    def test_tail_hull(self):
        assert self.tail().hull() == arc(0, -2)
        # a zero-depth expansion keeps only the limit
        assert self.tail().expand(0) == IntervalUnion.point(ZERO)
        assert FiniteAttractor(arc(0, 1)).hull() == arc(0, 1)


ROOT2_M1 = QNum(-1, 1, 1, 2)        # sqrt(2) - 1
QUARTER_ROOT2 = QNum(0, 1, 4, 2)    # sqrt(2) / 4


class TestForeignFieldPoints:
    """Membership of points outside the field of the endpoints"""

    def test_finite(self):
        golden = FiniteAttractor(arc(0, TAU - 1))
        assert golden.contains(ROOT2_M1)
        assert not FiniteAttractor(arc(TAU - 2, 0)).contains(-ROOT2_M1)
        assert arc(ROOT2_M1, TAU - 1).contains(QNum(-1, 1, 1, 3) - QNum.rational(3, 10))

    def test_set_algebra(self):
        mixed = arc(0, ROOT2_M1) | arc(TAU - 1, 1)
        assert len(mixed.components()) == 2
        assert (mixed & arc(QNum.rational(1, 2), 1)) == arc(TAU - 1, 1)

    def test_tail_with_golden_base(self):
        t = ParabolicTail(L, arc(QNum.rational(1, 2), TAU - 1), ZERO)
        assert t.contains(QUARTER_ROOT2)
        assert t.iterate_index(QUARTER_ROOT2) == 1
        assert not t.contains(ROOT2_M1)
        assert t.hull() == arc(0, TAU - 1)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
