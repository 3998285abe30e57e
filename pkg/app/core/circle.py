"""
Circle Arithmetic
Points of R/Z with the arc-length metric, the doubling map D and the rotation R_alpha
"""

from fractions import Fraction
from typing import TYPE_CHECKING, Dict, Optional, Union

from app.config import get_default_precision
from app.core.ball import BallReal

if TYPE_CHECKING:
    from app.core.alpha import AlphaSpec


class SturmianTag:
    """
    Exact label of a point of the Sturmian support.

    The tagged point is pi(F(base + shift * alpha)). Doubling only bumps the
    shift, since 2F(u) = floor(u) + F(u + alpha).
    """

    __slots__ = ("alpha", "base", "shift")

    def __init__(self, alpha: "AlphaSpec", base: Fraction, shift: int = 0):
        self.alpha = alpha
        self.base = Fraction(base)
        self.shift = shift

    def advanced(self, steps: int = 1) -> "SturmianTag":
        return SturmianTag(self.alpha, self.base, self.shift + steps)

    def preimage(self, prec: int = None) -> "CirclePoint":
        """h of the tagged point: pi(base + shift * alpha)"""
        prec = prec or get_default_precision()
        if self.shift == 0:
            return CirclePoint(self.base)
        return CirclePoint(self.alpha.value(prec) * self.shift + self.base)

    def preimage_float(self) -> float:
        return (float(self.base) + self.shift * self.alpha.float_value) % 1.0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SturmianTag)
            and self.alpha == other.alpha
            and self.base == other.base
            and self.shift == other.shift
        )

    def __hash__(self) -> int:
        return hash((self.alpha, self.base, self.shift))

    def __repr__(self) -> str:
        return f"SturmianTag(base={self.base}, shift={self.shift})"


class CirclePoint:
    """
    A point of the circle T = R/Z.

    The representative is either an exact Fraction in [0, 1) (rational fast
    path) or a BallReal reduced to [0, 1) up to its radius. Points produced by
    the Sturmian sampler carry a SturmianTag and resolve their representative
    lazily through the staircase.
    """

    __slots__ = ("value", "tag", "_balls")

    def __init__(self, value: Union[int, Fraction, str, float, BallReal, None] = None, tag: Optional[SturmianTag] = None):
        if value is None and tag is None:
            raise ValueError("CirclePoint needs a value or a tag")
        if isinstance(value, BallReal):
            value = value.frac()
        elif value is not None:
            value = Fraction(value) % 1
        self.value = value
        self.tag = tag
        self._balls: Dict[int, BallReal] = {}

    @property
    def is_exact(self) -> bool:
        return isinstance(self.value, Fraction)

    @property
    def is_tagged(self) -> bool:
        return self.tag is not None

    def ball(self, prec: int = None) -> BallReal:
        """Representative as a ball at the requested precision"""
        prec = prec or get_default_precision()
        cached = self._balls.get(prec)
        if cached is not None:
            return cached
        if isinstance(self.value, Fraction):
            result = BallReal.exact(self.value, prec)
        elif isinstance(self.value, BallReal):
            result = self.value.with_precision(prec)
        else:
            from app.sturmian.staircase import resolve_tag
            result = resolve_tag(self.tag, prec)
        self._balls[prec] = result
        return result

    def __float__(self) -> float:
        if isinstance(self.value, Fraction):
            return float(self.value)
        return float(self.ball()) % 1.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, CirclePoint):
            return NotImplemented
        if self.tag is not None or other.tag is not None:
            return self.tag == other.tag
        if self.is_exact and other.is_exact:
            return self.value == other.value
        return self is other

    def __hash__(self) -> int:
        if self.tag is not None:
            return hash(self.tag)
        if self.is_exact:
            return hash(self.value)
        return id(self)

    def __repr__(self) -> str:
        if self.tag is not None:
            return f"CirclePoint({self.tag!r})"
        return f"CirclePoint({self.value})"


def circle_distance(x: CirclePoint, y: CirclePoint, prec: int = None) -> BallReal:
    """Arc-length distance min_k |x - y - k|, enclosed; lies in [0, 1/2]"""
    prec = prec or get_default_precision()
    if x.is_exact and y.is_exact:
        r = (x.value - y.value) % 1
        return BallReal.exact(min(r, 1 - r), prec)
    diff = x.ball(prec) - y.ball(prec)
    nearest = int(diff.context.nint(diff.mid))
    return abs(diff - nearest)


def doubling(x: CirclePoint) -> CirclePoint:
    """D(x) = 2x mod 1; exact on rationals and on tagged points"""
    if x.tag is not None:
        return CirclePoint(tag=x.tag.advanced())
    if x.is_exact:
        return CirclePoint(2 * x.value)
    return CirclePoint(x.value.mul_pow2(1))


def halving(x: CirclePoint) -> CirclePoint:
    """The preimage of x under D that lies in [0, 1/2)"""
    if x.is_exact:
        return CirclePoint(x.value / 2)
    return CirclePoint(x.ball().mul_pow2(-1))


def rotate(x: CirclePoint, alpha: "AlphaSpec", steps: int = 1, prec: int = None) -> CirclePoint:
    """R_alpha^steps(x) = x + steps * alpha mod 1"""
    prec = prec or get_default_precision()
    exact_alpha = alpha.exact_value
    if x.is_exact and exact_alpha is not None:
        return CirclePoint(x.value + steps * exact_alpha)
    return CirclePoint(x.ball(prec) + alpha.value(prec) * steps)
