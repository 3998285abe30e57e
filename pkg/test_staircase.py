#!/usr/bin/env python3
"""
Staircase tests
F, f, the inverse h~ and tag resolution
"""

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

# Add the project directory to Python path
project_dir = Path(__file__).parent
sys.path.insert(0, str(project_dir))

from app.core.alpha import parse_alpha
from app.core.ball import mpf_to_fraction
from app.core.circle import CirclePoint, SturmianTag, circle_distance, doubling, rotate
from app.core.errors import UndecidableComparison
from app.sturmian.gaps import Verdict, classify, draw_uniform, get_gap_atlas, sample_sturmian
from app.sturmian.staircase import (
    factor_map_h,
    get_staircase_context,
    mechanical_digits,
    resolve_tag,
    staircase_F,
    staircase_at_jump,
    staircase_inverse,
    staircase_pair,
)


@pytest.fixture(scope="module")
def ctx():
    return get_staircase_context(parse_alpha("gold2"), 128)


def test_jump_at_zero_is_one_half(ctx):
    f0, F0 = staircase_pair(Fraction(0), ctx)
    assert (F0 - f0).contains(Fraction(1, 2))
    assert float(F0.rad) < 2.0 ** -100


def test_F_minus_identity_is_periodic(ctx):
    x = Fraction(1, 7)
    assert (staircase_F(x + 1, ctx) - staircase_F(x, ctx)).contains(1)


def test_F_is_strictly_increasing(ctx):
    assert staircase_F(Fraction(1, 7), ctx).definitely_less(staircase_F(Fraction(2, 7), ctx))
    assert staircase_F(Fraction(2, 7), ctx).definitely_less(staircase_F(Fraction(1, 2), ctx))


@pytest.mark.parametrize("n", [0, 1, 3, 10])
def test_jump_sizes(ctx, n):
    f_value, F_value = staircase_at_jump(n, 0, ctx)
    assert (F_value - f_value).contains(Fraction(1, 1 << (n + 1)))


def test_jump_at_zero_agrees_with_direct_series(ctx):
    f0, F0 = staircase_pair(Fraction(0), ctx)
    f_jump, F_jump = staircase_at_jump(0, 0, ctx)
    assert F0.overlaps(F_jump)
    assert f0.overlaps(f_jump)


def test_inverse_recovers_continuity_points(ctx):
    x = Fraction(3, 10)
    y = staircase_F(x, ctx)
    assert staircase_inverse(y, ctx).contains(x)


def test_inverse_collapses_plateaus(ctx):
    f0, F0 = staircase_pair(Fraction(0), ctx)
    y = (mpf_to_fraction(f0.mid) + mpf_to_fraction(F0.mid)) / 2
    h = staircase_inverse(y, ctx)
    assert h.contains(0)
    assert float(h.rad) < 2.0 ** -70


def test_factor_map_returns_tag_preimage(ctx):
    alpha = ctx.alpha
    point = CirclePoint(tag=SturmianTag(alpha, Fraction(1, 3)))
    assert factor_map_h(point, ctx) == CirclePoint(Fraction(1, 3))


def test_factor_map_on_untagged_balls_of_k_is_coarse_but_sound(ctx):
    point = CirclePoint(tag=SturmianTag(ctx.alpha, Fraction(1, 3)))
    h = factor_map_h(CirclePoint(point.ball(ctx.precision)), ctx).ball(ctx.precision)
    assert h.contains(Fraction(1, 3))
    assert 0.0 < float(h.rad) < 0.1


def test_resolved_tags_follow_the_doubling_map(ctx):
    alpha = ctx.alpha
    base = resolve_tag(SturmianTag(alpha, Fraction(1, 3)), 128)
    assert base.overlaps(staircase_F(Fraction(1, 3), ctx).frac())
    doubled = resolve_tag(SturmianTag(alpha, Fraction(1, 3), shift=1), 128)
    assert float(doubled) == pytest.approx((2 * float(base)) % 1.0, abs=1e-12)


def test_mechanical_digits():
    assert mechanical_digits(Fraction(0), 5, parse_alpha("cf:0,2,2")) == [0, 0, 1, 0, 1]
    digits = mechanical_digits(Fraction(0), 1000, parse_alpha("gold2"))
    assert set(digits) <= {0, 1}
    assert sum(digits) == 381


def test_functional_equation(ctx):
    rng = np.random.default_rng(3)
    alpha = ctx.alpha.value(128)
    for _ in range(60):
        x = Fraction(int(rng.integers(-1 << 30, 2 << 30)), 1 << 30)
        lhs = staircase_F(x, ctx) * 2
        rhs = staircase_F(alpha + x, ctx) + (x.numerator // x.denominator)
        assert lhs.overlaps(rhs)


def test_inverse_at_negative_values(ctx):
    y = Fraction(-1, 2)
    x = staircase_inverse(y, ctx)
    assert x.overlaps(staircase_inverse(y + 1, ctx) - 1)
    below, above = mpf_to_fraction(x.lower), mpf_to_fraction(x.upper)
    assert not staircase_F(below, ctx).definitely_greater(y)
    assert not staircase_pair(above, ctx)[0].definitely_less(y)


def test_inverse_doubling_relation(ctx):
    rng = np.random.default_rng(17)
    alpha = ctx.alpha.value(128)
    values = [Fraction(-581264549, 1 << 30)]
    values += [Fraction(int(k), 1 << 30) for k in rng.integers(-1 << 30, 1 << 30, size=40)]
    checked = 0
    for y in values:
        x = staircase_inverse(y, ctx)
        try:
            whole = x.floor()
        except UndecidableComparison:
            continue
        expected = x + alpha + whole
        assert staircase_inverse(2 * y, ctx).overlaps(expected)
        checked += 1
    assert checked >= 30


@pytest.mark.parametrize("u", [Fraction(1, 3), Fraction(2, 7), Fraction(5, 11)])
def test_binary_digits_of_F_are_the_mechanical_word(ctx, u):
    digits = mechanical_digits(u, 64, ctx.alpha)
    scaled = staircase_F(u, ctx).mul_pow2(64).floor()
    assert format(scaled, "064b") == "".join(str(d) for d in digits)


def test_semiconjugacy_on_gap_points(ctx):
    rng = np.random.default_rng(23)
    alpha = ctx.alpha
    for _ in range(25):
        x = CirclePoint(draw_uniform(rng, 40))
        h_x = factor_map_h(x, ctx)
        h_dx = factor_map_h(doubling(x), ctx)
        assert float(circle_distance(h_dx, rotate(h_x, alpha, prec=128), 128)) < 1e-20


@pytest.mark.parametrize("u", [Fraction(1, 5), Fraction(3, 10), Fraction(7, 9)])
def test_inverse_undoes_the_staircase(ctx, u):
    assert staircase_inverse(staircase_F(u, ctx), ctx).contains(u)


def test_sturmian_samples_avoid_the_first_gap(ctx):
    atlas = get_gap_atlas(ctx.alpha, 128)
    rng = np.random.default_rng(29)
    for _ in range(20):
        result = classify(sample_sturmian(draw_uniform(rng), ctx), atlas, 10)
        assert result.verdict is Verdict.IN_K
