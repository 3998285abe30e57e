"""
Devil's Staircase
The monotone pair F, f, the inverse h~ and the circle factor map h
"""

from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple, Union

from app.config import (
    INVERSE_RADIUS_BITS,
    MAX_PRECISION,
    MIN_TRUNCATION_DEPTH,
    get_default_precision,
)
from app.core.alpha import AlphaSpec
from app.core.ball import BallReal, mpf_to_fraction
from app.core.circle import CirclePoint, SturmianTag
from app.core.errors import UndecidableFloor

Real = Union[BallReal, Fraction, int]

# fixed-point guard bits carried on top of the working precision
GUARD_BITS = 64


class StaircaseContext:
    """
    Evaluation context for F(x) = sum_n 2^(-n-1) floor(x + n*alpha).

    The series is summed exactly on integer fixed-point enclosures up to the
    truncation depth N; the tail is enclosed through
    floor(y) in (y - 1, y], which contributes 2^-N to the radius.
    """

    def __init__(self, alpha: AlphaSpec, precision: int = None, max_precision: int = MAX_PRECISION):
        self.alpha = alpha
        self.precision = precision or get_default_precision()
        self.max_precision = max(max_precision, self.precision)
        self.truncation_depth = max(MIN_TRUNCATION_DEPTH, self.precision + 8)
        self.fixed_bits = self.precision + GUARD_BITS

    @property
    def tail_bound(self) -> BallReal:
        """Upper bound for sum_{n>N} 2^(-n-1) (|x| + n*alpha + 1) over x in [0, 1)"""
        n = self.truncation_depth
        return BallReal.exact(Fraction(n + 4, 1 << (n + 1)), self.precision)

    def alpha_bounds(self, bits: int) -> Tuple[int, int]:
        return self.alpha.fractional_bounds(bits)

    def escalated(self) -> Optional["StaircaseContext"]:
        """Context at twice the precision, or None at the cap"""
        if self.precision >= self.max_precision:
            return None
        return get_staircase_context(self.alpha, min(2 * self.precision, self.max_precision), self.max_precision)

    def __repr__(self) -> str:
        return f"StaircaseContext({self.alpha.source!r}, prec={self.precision}, N={self.truncation_depth})"


@lru_cache(maxsize=64)
def get_staircase_context(alpha: AlphaSpec, precision: int = None, max_precision: int = MAX_PRECISION) -> StaircaseContext:
    """Shared context per (alpha, precision)"""
    return StaircaseContext(alpha, precision or get_default_precision(), max_precision)


def _series(x_lo: int, x_hi: int, bits: int, depth: int, alpha_lo: int, alpha_hi: int,
            jump: Optional[Tuple[int, int]] = None) -> Tuple[int, int, int, int]:
    """
    Fixed-point enclosures of f(x) and F(x) scaled by 2**(depth + bits)

    x_lo, x_hi bound x * 2**bits; jump = (n, m) declares x = m - n*alpha so
    every term is evaluated from the exact offset m + (j - n)*alpha.
    """
    one = 1 << bits
    sum_upper = 0
    sum_lower = 0
    for j in range(depth):
        if jump is None:
            y_lo = x_lo + j * alpha_lo
            y_hi = x_hi + j * alpha_hi
        else:
            n, m = jump
            k = j - n
            if k == 0:
                sum_upper = 2 * sum_upper + m
                sum_lower = 2 * sum_lower + m - 1
                continue
            base = m << bits
            y_lo, y_hi = (base + k * alpha_lo, base + k * alpha_hi) if k > 0 else (base + k * alpha_hi, base + k * alpha_lo)
        upper_term = y_lo >> bits
        lower_term = (y_lo - 1) >> bits
        if upper_term != (y_hi >> bits) or lower_term != ((y_hi - 1) >> bits):
            raise UndecidableFloor(j)
        sum_upper = 2 * sum_upper + upper_term
        sum_lower = 2 * sum_lower + lower_term
    if jump is None:
        tail_lo = x_lo + (depth + 1) * alpha_lo
        tail_hi = x_hi + (depth + 1) * alpha_hi
    else:
        n, m = jump
        k = depth + 1 - n
        tail_lo = (m << bits) + k * alpha_lo
        tail_hi = (m << bits) + k * alpha_hi
    upper_lo = (sum_upper << bits) + tail_lo - one
    upper_hi = (sum_upper << bits) + tail_hi
    lower_lo = (sum_lower << bits) + tail_lo - one
    lower_hi = (sum_lower << bits) + tail_hi
    return lower_lo, lower_hi, upper_lo, upper_hi


def _fixed_input(x: Real, bits: int) -> Tuple[int, int, bool]:
    if isinstance(x, BallReal):
        lo, hi = x.to_fixed(bits)
        return lo, hi, x.is_exact
    q = Fraction(x) * (1 << bits)
    return q.numerator // q.denominator, -((-q.numerator) // q.denominator), True


def staircase_pair(x: Real, ctx: StaircaseContext) -> Tuple[BallReal, BallReal]:
    """
    Enclosures of (f(x), F(x))

    Exact inputs escalate the fixed-point precision on undecidable floors;
    inputs with a nonzero radius fail immediately since the radius, not
    alpha, is what blocks the decision.

    Raises:
        UndecidableFloor: x + j*alpha is within the radius of an integer
    """
    bits = ctx.fixed_bits
    while True:
        x_lo, x_hi, exact = _fixed_input(x, bits)
        a_lo, a_hi = ctx.alpha_bounds(bits)
        try:
            lower_lo, lower_hi, upper_lo, upper_hi = _series(x_lo, x_hi, bits, ctx.truncation_depth, a_lo, a_hi)
            break
        except UndecidableFloor:
            if not exact or bits >= ctx.max_precision + GUARD_BITS:
                raise
            bits = min(2 * bits, ctx.max_precision + GUARD_BITS)
    shift = ctx.truncation_depth + bits
    return (
        BallReal.from_fixed(lower_lo, lower_hi, shift, ctx.precision),
        BallReal.from_fixed(upper_lo, upper_hi, shift, ctx.precision),
    )


def staircase_F(x: Real, ctx: StaircaseContext) -> BallReal:
    """Right-continuous staircase F(x) = sum 2^(-n-1) floor(x + n*alpha)"""
    return staircase_pair(x, ctx)[1]


def staircase_f(x: Real, ctx: StaircaseContext) -> BallReal:
    """Left-continuous staircase f(x) = sum 2^(-n-1) (ceil(x + n*alpha) - 1)"""
    return staircase_pair(x, ctx)[0]


@lru_cache(maxsize=8192)
def staircase_at_jump(n: int, m: int, ctx: StaircaseContext) -> Tuple[BallReal, BallReal]:
    """
    One-sided values (f, F) at the jump point x = m - n*alpha

    F - f = 2^(-n-1) exactly; both share one enclosure radius.
    """
    bits = ctx.fixed_bits
    depth = max(ctx.truncation_depth, n + ctx.precision + 8)
    while True:
        a_lo, a_hi = ctx.alpha_bounds(bits)
        try:
            _, _, upper_lo, upper_hi = _series(0, 0, bits, depth, a_lo, a_hi, jump=(n, m))
            break
        except UndecidableFloor:
            if bits >= ctx.max_precision + GUARD_BITS:
                raise
            bits *= 2
    shift = depth + bits
    step = 1 << (shift - n - 1)
    return (
        BallReal.from_fixed(upper_lo - step, upper_hi - step, shift, ctx.precision),
        BallReal.from_fixed(upper_lo, upper_hi, shift, ctx.precision),
    )


def _dyadic_floor(value: Fraction, bits: int) -> Fraction:
    scaled = value * (1 << bits)
    return Fraction(scaled.numerator // scaled.denominator, 1 << bits)


def staircase_inverse(y: Real, ctx: StaircaseContext, radius_bits: int = INVERSE_RADIUS_BITS) -> BallReal:
    """
    h~(y): the unique x with f(x) <= y <= F(x), by bisection

    The enclosure is always sound. The requested radius 2**-radius_bits is
    reached on plateaus and for exact inputs with enough precision; h~ has
    only a logarithmic modulus of continuity, so for a ball input the result
    is as tight as its radius allows.

    Args:
        y: Value to invert (ball or exact rational)
        ctx: Staircase context
        radius_bits: Target output radius as a power of two

    Returns:
        Ball enclosure of h~(y)
    """
    y_ball = y if isinstance(y, BallReal) else BallReal.exact(y, ctx.precision)
    exact = not isinstance(y, BallReal) or y.is_exact
    y_lower, y_upper = mpf_to_fraction(y_ball.lower), mpf_to_fraction(y_ball.upper)
    a_lo, a_hi = ctx.alpha_bounds(64)
    lo = _dyadic_floor(y_lower - Fraction(a_hi, 1 << 64), 16)
    hi = -_dyadic_floor(-(y_upper - Fraction(a_lo, 1 << 64) + 1), 16)
    target = Fraction(1, 1 << (radius_bits - 1))
    current = ctx

    while hi - lo > target:
        middle = (lo + hi) / 2
        f_mid, F_mid = staircase_pair(middle, current)
        if F_mid.definitely_less(y_ball):
            lo = middle
        elif f_mid.definitely_greater(y_ball):
            hi = middle
        elif f_mid.upper <= y_ball.lower and y_ball.upper <= F_mid.lower:
            return BallReal.exact(middle, ctx.precision)
        else:
            escalated = current.escalated() if exact else None
            if escalated is None:
                break
            current = escalated
    return BallReal.from_interval(lo, hi, ctx.precision)


def factor_map_h(x: CirclePoint, ctx: StaircaseContext) -> CirclePoint:
    """
    h(pi(x)) = pi(h~(x)); tagged points return their exact label

    On gaps and exact inputs the result is tight. For an untagged ball point
    of K with radius r, h~ has only a logarithmic modulus of continuity and
    the enclosure radius is about 1/log2(1/r): roughly 1/128 at 128 bits.
    Sample K through tags when h is needed precisely.
    """
    if x.tag is not None:
        return x.tag.preimage(ctx.precision)
    return CirclePoint(staircase_inverse(x.ball(ctx.precision) if not x.is_exact else x.value, ctx))


@lru_cache(maxsize=65536)
def _resolve(alpha: AlphaSpec, base: Fraction, shift: int, prec: int) -> BallReal:
    ctx = get_staircase_context(alpha, prec)
    bits = ctx.fixed_bits
    while True:
        a_lo, a_hi = ctx.alpha_bounds(bits)
        scaled = base * (1 << bits)
        x_lo = scaled.numerator // scaled.denominator + shift * a_lo
        x_hi = -((-scaled.numerator) // scaled.denominator) + shift * a_hi
        whole = x_lo >> bits
        if whole == x_hi >> bits:
            x_lo -= whole << bits
            x_hi -= whole << bits
            try:
                _, _, upper_lo, upper_hi = _series(x_lo, x_hi, bits, ctx.truncation_depth, a_lo, a_hi)
                break
            except UndecidableFloor:
                pass
        if bits >= ctx.max_precision + GUARD_BITS:
            raise UndecidableFloor(-1, f"tag base={base} shift={shift} is not resolvable")
        bits *= 2
    return BallReal.from_fixed(upper_lo, upper_hi, ctx.truncation_depth + bits, prec)


def resolve_tag(tag: SturmianTag, prec: int = None) -> BallReal:
    """Representative of pi(F(base + shift*alpha)) in [0, 1)"""
    return _resolve(tag.alpha, tag.base, tag.shift, prec or get_default_precision()).frac()


def mechanical_digits(u: Fraction, count: int, alpha: AlphaSpec, bits: int = 128) -> List[int]:
    """Lower mechanical word floor(u + (n+1)*alpha) - floor(u + n*alpha), n < count"""
    if alpha.exact_value is not None:
        floors = [int((Fraction(u) + j * alpha.exact_value) // 1) for j in range(count + 1)]
        return [floors[k + 1] - floors[k] for k in range(count)]
    while True:
        a_lo, a_hi = alpha.fixed_bounds(bits)
        scaled = Fraction(u) * (1 << bits)
        u_lo = scaled.numerator // scaled.denominator
        u_hi = -((-scaled.numerator) // scaled.denominator)
        floors = []
        for j in range(count + 1):
            lo, hi = (u_lo + j * a_lo) >> bits, (u_hi + j * a_hi) >> bits
            if lo != hi:
                break
            floors.append(lo)
        else:
            return [floors[k + 1] - floors[k] for k in range(count)]
        bits *= 2
