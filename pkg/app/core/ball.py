"""
Ball Arithmetic
Midpoint-radius real numbers at a configurable binary precision
"""

import sys
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Tuple, TypeVar, Union

import mpmath

from app.config import MAX_PRECISION, get_default_precision
from app.core.errors import PrecisionExhausted, UndecidableComparison

T = TypeVar("T")
Number = Union[int, float, Fraction, str]


class Ordering(Enum):
    """Result of comparing two enclosures"""
    LESS = "less"
    GREATER = "greater"
    UNDECIDABLE = "undecidable"


@lru_cache(maxsize=None)
def get_context(prec: int) -> "mpmath.MPContext":
    """One mpmath context per precision; contexts are never mutated after creation"""
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return ctx


def mpf_to_fraction(value) -> Fraction:
    """Exact rational value of a finite mpf"""
    # man_exp drops the sign; the raw tuple is (sign, man, exp, bitcount)
    sign, man, exp, _ = value._mpf_
    man = -int(man) if sign else int(man)
    if exp >= 0:
        return Fraction(man << exp)
    return Fraction(man, 1 << -exp)


def _rounding_error(ctx, value):
    # round-to-nearest leaves at most half an ulp; one full ulp is carried
    if not value:
        return ctx.zero
    return ctx.ldexp(abs(value), 1 - ctx.prec)


def _sum_up(ctx, *terms):
    total = ctx.zero
    for term in terms:
        total = ctx.fadd(total, term, rounding="u")
    return total


def _slack(ctx, value):
    # relative inflation for radii derived from transcendental evaluations
    return ctx.fmul(value, 1 + ctx.ldexp(1, 4 - ctx.prec), rounding="u")


class BallReal:
    """Closed ball [mid - rad, mid + rad] that always contains the exact value"""

    __slots__ = ("mid", "rad", "prec")

    def __init__(self, mid, rad=0, prec: int = None):
        self.prec = prec or get_default_precision()
        ctx = get_context(self.prec)
        self.mid = ctx.mpf(mid)
        self.rad = ctx.fadd(rad, 0, rounding="u")
        if self.rad < 0:
            raise ValueError("radius must be nonnegative")

    # -- construction -----------------------------------------------------

    @classmethod
    def exact(cls, value: Union[Number, "BallReal"], prec: int = None) -> "BallReal":
        """Enclose an exact number; the radius is zero when it is representable"""
        prec = prec or get_default_precision()
        if isinstance(value, BallReal):
            return value.with_precision(prec)
        ctx = get_context(prec)
        if isinstance(value, float):
            return cls(ctx.mpf(value), 0, prec)
        if isinstance(value, str):
            value = Fraction(value)
        value = Fraction(value)
        mid = ctx.fdiv(value.numerator, value.denominator)
        if mpf_to_fraction(mid) == value:
            return cls(mid, 0, prec)
        return cls(mid, _rounding_error(ctx, mid), prec)

    @classmethod
    def from_fixed(cls, lower: int, upper: int, shift: int, prec: int = None) -> "BallReal":
        """Ball enclosing [lower, upper] * 2**-shift for integers lower <= upper"""
        prec = prec or get_default_precision()
        ctx = get_context(prec)
        centre = (lower + upper) >> 1
        mid = ctx.ldexp(ctx.mpf(centre), -shift)
        spread = ctx.ldexp(ctx.fadd(upper - centre, 0, rounding="u"), -shift)
        return cls(mid, _sum_up(ctx, spread, _rounding_error(ctx, mid)), prec)

    @classmethod
    def from_interval(cls, lower: Number, upper: Number, prec: int = None) -> "BallReal":
        """Smallest convenient ball containing [lower, upper]"""
        prec = prec or get_default_precision()
        ctx = get_context(prec)
        lo, hi = Fraction(lower), Fraction(upper)
        if hi < lo:
            lo, hi = hi, lo
        centre = (lo + hi) / 2
        mid = ctx.fdiv(centre.numerator, centre.denominator)
        mid_q = mpf_to_fraction(mid)
        spread = max(hi - mid_q, mid_q - lo)
        rad = ctx.fdiv(spread.numerator, spread.denominator, rounding="u")
        return cls(mid, rad, prec)

    def with_precision(self, prec: int) -> "BallReal":
        if prec == self.prec:
            return self
        ctx = get_context(prec)
        mid = ctx.mpf(self.mid)
        extra = ctx.zero if mid == self.mid else _rounding_error(ctx, mid)
        return BallReal(mid, _sum_up(ctx, self.rad, extra), prec)

    # -- views --------------------------------------------------------------

    @property
    def context(self):
        return get_context(self.prec)

    @property
    def lower(self):
        return self.context.fsub(self.mid, self.rad, rounding="d")

    @property
    def upper(self):
        return self.context.fadd(self.mid, self.rad, rounding="u")

    @property
    def is_exact(self) -> bool:
        return not self.rad

    def to_fixed(self, bits: int) -> Tuple[int, int]:
        """Integers lo <= hi with lo <= value * 2**bits <= hi"""
        ctx = self.context
        scaled = ctx.ldexp(self.mid, bits)
        spread = int(ctx.ceil(ctx.ldexp(self.rad, bits)))
        return int(ctx.floor(scaled)) - spread, int(ctx.ceil(scaled)) + spread

    def contains(self, value: Union[Number, "BallReal"]) -> bool:
        if isinstance(value, BallReal):
            return self.lower <= value.lower and value.upper <= self.upper
        q = Fraction(value)
        return mpf_to_fraction(self.lower) <= q <= mpf_to_fraction(self.upper)

    def overlaps(self, other: Union[Number, "BallReal"]) -> bool:
        return self.compare(other) is Ordering.UNDECIDABLE

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"BallReal({mpmath.nstr(self.mid, 20)} +/- {mpmath.nstr(self.rad, 3)}, prec={self.prec})"

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "BallReal":
        if isinstance(other, BallReal):
            return other
        return BallReal.exact(other, self.prec)

    def _joint(self, other: "BallReal"):
        return get_context(max(self.prec, other.prec))

    def __neg__(self) -> "BallReal":
        return BallReal(-self.mid, self.rad, self.prec)

    def __add__(self, other) -> "BallReal":
        other = self._coerce(other)
        ctx = self._joint(other)
        mid = ctx.fadd(self.mid, other.mid)
        return BallReal(mid, _sum_up(ctx, self.rad, other.rad, _rounding_error(ctx, mid)), ctx.prec)

    __radd__ = __add__

    def __sub__(self, other) -> "BallReal":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "BallReal":
        return self._coerce(other) - self

    def __mul__(self, other) -> "BallReal":
        other = self._coerce(other)
        ctx = self._joint(other)
        mid = ctx.fmul(self.mid, other.mid)
        rad = _sum_up(
            ctx,
            ctx.fmul(abs(self.mid), other.rad, rounding="u"),
            ctx.fmul(abs(other.mid), self.rad, rounding="u"),
            ctx.fmul(self.rad, other.rad, rounding="u"),
            _rounding_error(ctx, mid),
        )
        return BallReal(mid, rad, ctx.prec)

    __rmul__ = __mul__

    def reciprocal(self) -> "BallReal":
        ctx = self.context
        floor_abs = ctx.fsub(abs(self.mid), self.rad, rounding="d")
        if floor_abs <= 0:
            raise UndecidableComparison(f"division by a ball containing zero: {self!r}")
        mid = ctx.fdiv(1, self.mid)
        denom = ctx.fmul(abs(self.mid), floor_abs, rounding="d")
        rad = _sum_up(ctx, ctx.fdiv(self.rad, denom, rounding="u"), _rounding_error(ctx, mid))
        return BallReal(mid, rad, self.prec)

    def __truediv__(self, other) -> "BallReal":
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other) -> "BallReal":
        return self._coerce(other) * self.reciprocal()

    def __abs__(self) -> "BallReal":
        if self.lower >= 0:
            return self
        if self.upper <= 0:
            return -self
        ctx = self.context
        half = ctx.ldexp(max(abs(self.lower), abs(self.upper)), -1)
        return BallReal(half, _slack(ctx, half), self.prec)

    def mul_pow2(self, k: int) -> "BallReal":
        """Exact scaling by 2**k"""
        ctx = self.context
        return BallReal(ctx.ldexp(self.mid, k), ctx.ldexp(self.rad, k), self.prec)

    def floor(self) -> int:
        ctx = self.context
        lo, hi = ctx.floor(self.lower), ctx.floor(self.upper)
        if lo != hi:
            raise UndecidableComparison(f"floor undecidable for {self!r}")
        return int(lo)

    def frac(self) -> "BallReal":
        """Representative reduced by the integer part of the midpoint"""
        return self - int(self.context.floor(self.mid))

    # -- comparisons ----------------------------------------------------------

    def compare(self, other) -> Ordering:
        other = self._coerce(other)
        if self.upper < other.lower:
            return Ordering.LESS
        if self.lower > other.upper:
            return Ordering.GREATER
        return Ordering.UNDECIDABLE

    def definitely_less(self, other) -> bool:
        return self.compare(other) is Ordering.LESS

    def definitely_greater(self, other) -> bool:
        return self.compare(other) is Ordering.GREATER

    @staticmethod
    def hull(a: "BallReal", b: "BallReal") -> "BallReal":
        prec = max(a.prec, b.prec)
        lo = min(mpf_to_fraction(a.lower), mpf_to_fraction(b.lower))
        hi = max(mpf_to_fraction(a.upper), mpf_to_fraction(b.upper))
        return BallReal.from_interval(lo, hi, prec)

    @staticmethod
    def minimum(a: "BallReal", b: "BallReal") -> "BallReal":
        order = a.compare(b)
        if order is Ordering.LESS:
            return a
        if order is Ordering.GREATER:
            return b
        prec = max(a.prec, b.prec)
        lo = min(mpf_to_fraction(a.lower), mpf_to_fraction(b.lower))
        hi = min(mpf_to_fraction(a.upper), mpf_to_fraction(b.upper))
        return BallReal.from_interval(lo, hi, prec)

    # -- transcendental enclosures ------------------------------------------

    def sqrt(self) -> "BallReal":
        ctx = self.context
        if self.upper < 0:
            raise ValueError(f"sqrt of a negative ball {self!r}")
        lo = self.lower
        if lo <= 0:
            top = _slack(ctx, ctx.sqrt(self.upper))
            half = ctx.ldexp(top, -1)
            return BallReal(half, half, self.prec)
        mid = ctx.sqrt(self.mid)
        rad = _sum_up(ctx, _slack(ctx, ctx.fdiv(self.rad, ctx.sqrt(lo), rounding="u")), _rounding_error(ctx, mid))
        return BallReal(mid, rad, self.prec)

    def exp(self) -> "BallReal":
        ctx = self.context
        mid = ctx.exp(self.mid)
        slope = _slack(ctx, ctx.exp(self.upper))
        rad = _sum_up(ctx, ctx.fmul(slope, self.rad, rounding="u"), _rounding_error(ctx, mid))
        return BallReal(mid, rad, self.prec)

    def log(self) -> "BallReal":
        ctx = self.context
        lo = self.lower
        if lo <= 0:
            raise UndecidableComparison(f"log of a ball touching zero: {self!r}")
        mid = ctx.log(self.mid)
        rad = _sum_up(
            ctx,
            _slack(ctx, ctx.fdiv(self.rad, lo, rounding="u")),
            _rounding_error(ctx, mid),
            ctx.ldexp(1, -ctx.prec),
        )
        return BallReal(mid, rad, self.prec)

    def _trig(self, fn) -> "BallReal":
        ctx = self.context
        mid = fn(ctx.ldexp(self.mid, 1))
        slope = _slack(ctx, ctx.fmul(2, ctx.pi, rounding="u"))
        rad = _sum_up(
            ctx,
            ctx.fmul(slope, self.rad, rounding="u"),
            _rounding_error(ctx, mid),
            ctx.ldexp(1, 1 - ctx.prec),
        )
        return BallReal(mid, rad, self.prec)

    def cos_2pi(self) -> "BallReal":
        """Enclosure of cos(2*pi*x)"""
        return self._trig(self.context.cospi)

    def sin_2pi(self) -> "BallReal":
        """Enclosure of sin(2*pi*x)"""
        return self._trig(self.context.sinpi)


def escalate(fn: Callable[[int], T], precision: int, cap: int = MAX_PRECISION, label: str = "Ball") -> T:
    """
    Retry a precision-dependent computation, doubling the bits on undecidable comparisons

    Args:
        fn: Callable taking a precision in bits
        precision: Starting precision
        cap: Largest precision tried

    Returns:
        The first decided result
    """
    prec = precision
    while True:
        try:
            return fn(prec)
        except UndecidableComparison as e:
            if prec >= cap:
                raise PrecisionExhausted(f"undecidable at the {cap}-bit cap: {e}") from e
            print(f"[{label}] WARNING: undecidable at {prec} bits, retrying at {min(2 * prec, cap)}", file=sys.stderr)
            prec = min(2 * prec, cap)
