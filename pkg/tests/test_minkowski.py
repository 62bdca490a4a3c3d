"""
Unit tests for dyadic arithmetic, affine twins and the question mark function
"""

import pytest
import sys
import os
from fractions import Fraction

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.errors import OutOfRangeError
from src.exact import ONE, TAU, ZERO, QNum
from src.minkowski import (
    AFF_F, AFF_L, D_ZERO, HALF, AffMap, Dyadic, aff, affine_lengths, conjugacy_check,
    farey_points, measure_identity_holds, minkowski_bracket, minkowski_copy,
    qmark, qmark_approx, twin_map,
)
from src.utils import load_preset
from src.words import Word, normalize


def brackets(pair, value):
    lo, hi = pair
    return lo.to_fraction() <= value <= hi.to_fraction()


class TestDyadic:
    """Exact binary fractions"""

    def test_reduced(self):
        assert Dyadic(4, 3) == Dyadic(1, 1)
        assert Dyadic(6, 0).exp == 0

    def test_arithmetic(self):
        assert HALF + HALF == Dyadic(1)
        assert Dyadic(3, 2) - HALF == Dyadic(1, 2)
        assert HALF * HALF == Dyadic(1, 2)
        assert str(Dyadic(3, 2)) == "3/2^2"

    def test_from_fraction(self):
        assert Dyadic.from_fraction(Fraction(3, 8)) == Dyadic(3, 3)
        with pytest.raises(OutOfRangeError):
            Dyadic.from_fraction(Fraction(1, 3))

    def test_negative_exponent(self):
        with pytest.raises(OutOfRangeError):
            Dyadic(1, -1)


class TestAffineTwin:
    """Dyadic affine maps of words"""

    def test_letters(self):
        assert aff(Word("l"))(HALF) == Dyadic(1, 2)
        assert aff(normalize("n"))(D_ZERO) == HALF

    def test_flip(self):
        assert aff(normalize("f")) == AFF_F
        assert AFF_F(Dyadic(1, 2)) == Dyadic(3, 2)

    def test_inverse(self):
        assert AFF_L.inverse() @ AFF_L == AffMap(Dyadic(1))
        with pytest.raises(OutOfRangeError):
            AffMap(Dyadic(3)).inverse()

    def test_twin_with_offsets(self):
        spec = load_preset("tau-minus-one")
        assert twin_map(spec, "s") == AffMap(Dyadic(-1, 1), HALF)


class TestQuestionMark:
    """Exact values on rationals, brackets on irrationals"""

    @pytest.mark.parametrize("x, expected", [
        (QNum.rational(1, 3), Dyadic(1, 2)),
        (QNum.rational(2, 3), Dyadic(3, 2)),
        (QNum.rational(1, 2), Dyadic(1, 1)),
        (ZERO, Dyadic(0)),
        (ONE, Dyadic(1)),
    ])
    def test_rationals(self, x, expected):
        assert qmark(x) == expected

    def test_golden_bracket(self):
        pair = qmark_approx(TAU - 1, 20)
        assert brackets(pair, Fraction(2, 3))
        assert pair[1] - pair[0] == Dyadic(1, 20)

    def test_rational_bracket_is_exact(self):
        lo, hi = qmark_approx(QNum.rational(1, 3))
        assert lo == hi == Dyadic(1, 2)

    @pytest.mark.parametrize("x", [QNum(2), QNum(-1, 0, 2), TAU - 1])
    def test_out_of_range(self, x):
        with pytest.raises(OutOfRangeError):
            qmark(x)

    def test_bits_range(self):
        with pytest.raises(OutOfRangeError):
            qmark_approx(TAU - 1, 0)
        with pytest.raises(OutOfRangeError):
            qmark_approx(TAU - 1, 65)

    def test_farey_points(self):
        assert farey_points(3) == [ZERO, QNum.rational(1, 3), QNum.rational(1, 2),
                                   QNum.rational(2, 3), ONE]


class TestMinkowskiCopies:
    """Node copies, conjugacy and affine lengths"""

    def test_tau_minus_one_copies(self):
        spec = load_preset("tau-minus-one")
        assert brackets(minkowski_bracket(spec, 1, TAU - 1), Fraction(2, 3))
        assert brackets(minkowski_bracket(spec, 0, TAU - 2), Fraction(-1, 3))
        assert minkowski_copy(spec, 0, ZERO) == Dyadic(0)
        assert minkowski_copy(spec, 0, QNum(-1)) == Dyadic(-1)

    @pytest.mark.parametrize("name", ["farey", "ceiling", "tau-minus-one"])
    def test_conjugacy(self, name):
        report = conjugacy_check(load_preset(name), bound=6)
        assert report.checked > 0
        assert report.ok, report.mismatches

    def test_affine_lengths(self):
        spec = load_preset("tau-minus-one")
        lengths = affine_lengths(spec)
        assert brackets(lengths[0], Fraction(1, 3))
        assert brackets(lengths[1], Fraction(2, 3))
        assert measure_identity_holds(spec, lengths)

    def test_measure_identity_fails_for_wrong_lengths(self):
        spec = load_preset("tau-minus-one")
        wrong = [(Dyadic(1, 1), Dyadic(1, 1)), (Dyadic(1, 1), Dyadic(1, 1))]
        assert not measure_identity_holds(spec, wrong)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
