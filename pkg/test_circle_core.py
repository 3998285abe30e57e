#!/usr/bin/env python3
"""
Circle core tests
Ball arithmetic, rotation numbers and circle points
"""

import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

# Add the project directory to Python path
project_dir = Path(__file__).parent
sys.path.insert(0, str(project_dir))

from app.core.alpha import AlphaKind, parse_alpha
from app.core.ball import BallReal, Ordering, escalate, get_context, mpf_to_fraction
from app.core.circle import CirclePoint, SturmianTag, circle_distance, doubling, halving, rotate
from app.core.errors import AlphaError, PrecisionExhausted, UndecidableComparison

GOLD2 = (3 - math.sqrt(5)) / 2


def test_presets_parse_to_quadratic_surds():
    gold = parse_alpha("gold2")
    silver = parse_alpha("silver")
    assert gold.kind is AlphaKind.QUADRATIC_SURD
    assert gold.is_irrational and gold.unsafe is None
    assert gold.float_value == pytest.approx(GOLD2, abs=1e-15)
    assert silver.float_value == pytest.approx(math.sqrt(2) - 1, abs=1e-15)


def test_convergents_of_presets():
    gold = parse_alpha("gold2")
    assert gold.convergents(21) == [Fraction(p, q) for p, q in [(0, 1), (1, 2), (1, 3), (2, 5), (3, 8), (5, 13), (8, 21)]]
    assert parse_alpha("silver").convergents(5) == [Fraction(0, 1), Fraction(1, 2), Fraction(2, 5)]
    for c in gold.convergents(1000)[1:]:
        assert abs(GOLD2 - c) < Fraction(1, c.denominator ** 2)


def test_periodic_continued_fraction_matches_surd():
    cf = parse_alpha("cf:0,2,(1)")
    assert cf.is_irrational
    assert cf.float_value == pytest.approx(GOLD2, abs=1e-15)
    lo, hi = cf.fixed_bounds(200)
    g_lo, g_hi = parse_alpha("gold2").fixed_bounds(200)
    assert max(lo, g_lo) <= min(hi, g_hi)


def test_rational_inputs_are_flagged_unsafe():
    finite = parse_alpha("cf:0,2,1,1")
    assert finite.exact_value == Fraction(2, 5)
    assert finite.unsafe
    decimal = parse_alpha("0.25")
    assert decimal.kind is AlphaKind.DECIMAL
    assert decimal.unsafe
    with pytest.raises(AlphaError):
        decimal.convergents(10)


@pytest.mark.parametrize("text", ["surd:1,2,3", "cf:0,-1", "golden", "surd:1,1,0,5"])
def test_malformed_alpha_raises(text):
    with pytest.raises(AlphaError):
        parse_alpha(text)
    assert issubclass(AlphaError, ValueError)


def test_alpha_enclosure_contains_value():
    ball = parse_alpha("gold2").value(128)
    assert abs(float(ball) - GOLD2) < 1e-15
    assert float(ball.rad) < 2.0 ** -120


def test_ball_arithmetic_encloses_exact_results():
    third = BallReal.exact(Fraction(1, 3), 64)
    assert third.contains(Fraction(1, 3))
    assert (third + third + third).contains(1)
    assert (third * 3).contains(1)
    assert (1 - third).contains(Fraction(2, 3))
    assert third.reciprocal().contains(3)
    root = BallReal.exact(2, 64).sqrt()
    assert (root * root).contains(2)
    assert abs(float(root) - math.sqrt(2)) < 1e-15
    assert BallReal.exact(Fraction(1, 4), 64).cos_2pi().contains(0)
    assert BallReal.exact(Fraction(1, 4), 64).sin_2pi().contains(1)


def test_ball_comparisons():
    a = BallReal(0.5, 1e-3, 64)
    b = BallReal(0.51, 1e-3, 64)
    c = BallReal(0.5005, 1e-3, 64)
    assert a.compare(b) is Ordering.LESS
    assert b.compare(a) is Ordering.GREATER
    assert a.compare(c) is Ordering.UNDECIDABLE
    assert BallReal.minimum(a, b) is a
    assert a.mul_pow2(3).contains(4)


def test_floor_straddling_an_integer_is_undecidable():
    with pytest.raises(UndecidableComparison):
        BallReal(1, 0.01, 64).floor()
    assert BallReal(1.5, 0.01, 64).floor() == 1


def test_escalate_doubles_precision_until_decided():
    seen = []

    def fn(prec):
        seen.append(prec)
        if prec < 256:
            raise UndecidableComparison("not yet")
        return prec

    assert escalate(fn, 64, cap=1024) == 256
    assert seen == [64, 128, 256]

    def never(prec):
        raise UndecidableComparison("never")

    with pytest.raises(PrecisionExhausted):
        escalate(never, 64, cap=128)


def test_circle_distance_is_arc_length():
    assert circle_distance(CirclePoint(Fraction(1, 10)), CirclePoint(Fraction(9, 10))).contains(Fraction(1, 5))
    assert circle_distance(CirclePoint(Fraction(1, 3)), CirclePoint(Fraction(1, 3))).contains(0)
    d = circle_distance(CirclePoint(BallReal.exact(Fraction(1, 7))), CirclePoint(Fraction(6, 7)))
    assert d.contains(Fraction(2, 7))


def test_doubling_and_halving_on_exact_points():
    x = CirclePoint(Fraction(3, 8))
    assert doubling(halving(x)) == x
    assert doubling(CirclePoint(Fraction(2, 3))) == CirclePoint(Fraction(1, 3))
    assert CirclePoint(1) == CirclePoint(0)


def test_rotation_by_rational_alpha_is_exact():
    alpha = parse_alpha("cf:0,2,1,1")
    x = rotate(CirclePoint(Fraction(1, 5)), alpha, steps=3)
    assert x.is_exact
    assert x == CirclePoint(Fraction(2, 5))


def test_rotation_by_irrational_alpha_is_enclosed():
    alpha = parse_alpha("gold2")
    x = rotate(CirclePoint(Fraction(0)), alpha, steps=-5, prec=128)
    assert float(x) == pytest.approx((-5 * GOLD2) % 1.0, abs=1e-14)


def test_doubling_a_tagged_point_advances_its_shift():
    alpha = parse_alpha("gold2")
    point = CirclePoint(tag=SturmianTag(alpha, Fraction(1, 3)))
    image = doubling(doubling(point))
    assert image.is_tagged
    assert image.tag.shift == 2
    assert image.tag.base == Fraction(1, 3)
    assert image.tag.preimage_float() == pytest.approx((1 / 3 + 2 * GOLD2) % 1.0)


def test_negative_values_keep_their_sign():
    ctx = get_context(64)
    assert mpf_to_fraction(ctx.mpf(-0.75)) == Fraction(-3, 4)
    assert mpf_to_fraction(ctx.mpf(-3)) == -3
    assert mpf_to_fraction(ctx.mpf(0)) == 0
    assert BallReal.exact(Fraction(-1, 3), 64).contains(Fraction(-1, 3))


def test_balls_straddling_zero_contain_zero():
    straddle = BallReal(-1e-3, 2e-3, 64)
    assert straddle.contains(0)
    assert straddle.contains(-0.002)
    assert not straddle.contains(-0.01)
    assert BallReal.exact(Fraction(1, 4), 64).cos_2pi().contains(0)
    assert BallReal.exact(Fraction(1, 2), 64).sin_2pi().contains(0)


def test_hull_and_minimum_of_negative_balls():
    a, b = BallReal(-2.0, 0.5, 64), BallReal(-1.0, 0.25, 64)
    hull = BallReal.hull(a, b)
    assert hull.contains(-2.5) and hull.contains(-0.75)
    assert not hull.contains(0)
    low = BallReal.minimum(BallReal(-1.0, 0.5, 64), BallReal(-1.2, 0.5, 64))
    assert low.contains(-1.7) and not low.contains(-0.4)
    interval = BallReal.from_interval(Fraction(-3), Fraction(-1), 64)
    assert interval.contains(-2) and not interval.contains(0)


def test_circle_distance_triangle_inequality():
    rng = np.random.default_rng(11)
    for _ in range(200):
        a, b, c = (CirclePoint(Fraction(int(k), 1 << 20)) for k in rng.integers(0, 1 << 20, size=3))
        direct = circle_distance(a, c, 64)
        detour = circle_distance(a, b, 64) + circle_distance(b, c, 64)
        assert not direct.definitely_greater(detour)
        assert float(direct) <= 0.5
