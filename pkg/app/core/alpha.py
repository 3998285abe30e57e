"""
Rotation Numbers
Parsing of alpha presets, exact continued fractions and fixed-point enclosures
"""

import re
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import chain, cycle, islice
from math import isqrt
from typing import Iterator, List, Optional, Tuple

from app.config import get_default_precision
from app.core.ball import BallReal
from app.core.errors import AlphaError

PRESETS = {
    "gold2": "surd:3,-1,2,5",
    "silver": "surd:-1,1,1,2",
}

_CF_PATTERN = re.compile(r"^\s*(?P<head>[-\d,\s]*?)\s*(?:,?\s*\((?P<tail>[\d,\s]+)\))?\s*$")


class AlphaKind(Enum):
    QUADRATIC_SURD = "quadratic-surd"
    CONTINUED_FRACTION = "continued-fraction"
    DECIMAL = "decimal"


class AlphaSpec:
    """
    A rotation number alpha.

    Quadratic surds (a + b*sqrt(d))/c and eventually periodic continued
    fractions are irrational; finite continued fractions, perfect-square
    surds and decimal literals are rational and carry an "unsafe" flag.
    """

    def __init__(
        self,
        kind: AlphaKind,
        source: str,
        surd: Optional[Tuple[int, int, int, int]] = None,
        head: Tuple[int, ...] = (),
        tail: Tuple[int, ...] = (),
        rational: Optional[Fraction] = None,
    ):
        self.kind = kind
        self.source = source
        self.surd = surd
        self.head = head
        self.tail = tail
        self.rational = rational
        self._float: Optional[float] = None

    # -- identity -----------------------------------------------------------

    def _key(self):
        return (self.kind, self.surd, self.head, self.tail, self.rational)

    def __eq__(self, other) -> bool:
        return isinstance(other, AlphaSpec) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"AlphaSpec({self.source!r})"

    # -- classification -------------------------------------------------------

    @property
    def exact_value(self) -> Optional[Fraction]:
        """The value itself when alpha is rational"""
        return self.rational

    @property
    def is_irrational(self) -> bool:
        return self.rational is None

    @property
    def unsafe(self) -> Optional[str]:
        return None if self.is_irrational else "unsafe: rational"

    @property
    def float_value(self) -> float:
        if self._float is None:
            self._float = float(self.value(64))
        return self._float

    # -- continued fractions --------------------------------------------------

    def partial_quotients(self) -> Iterator[int]:
        """Continued-fraction digits a0; a1, a2, ... (finite for rationals)"""
        if self.kind is AlphaKind.DECIMAL or (self.kind is AlphaKind.QUADRATIC_SURD and self.rational is not None):
            yield from _rational_quotients(self.rational)
        elif self.kind is AlphaKind.CONTINUED_FRACTION:
            yield from (chain(self.head, cycle(self.tail)) if self.tail else self.head)
        else:
            yield from _surd_quotients(*self.surd)

    def convergents(self, max_q: int) -> List[Fraction]:
        """
        All convergents p/q with q <= max_q, in order

        Args:
            max_q: Largest admissible denominator

        Returns:
            List of Fractions; the first is floor(alpha)/1
        """
        if self.kind is AlphaKind.DECIMAL:
            raise AlphaError(f"convergents are not defined for decimal literal {self.source!r} (unsafe: rational)")
        result = []
        p_prev, q_prev, p, q = 0, 1, 1, 0
        for a in self.partial_quotients():
            p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
            if q > max_q:
                break
            result.append(Fraction(p, q))
        return result

    # -- enclosures ------------------------------------------------------------

    def fixed_bounds(self, bits: int) -> Tuple[int, int]:
        """Integers lo <= alpha * 2**bits <= hi with hi - lo <= 2"""
        return _fixed_bounds(self, bits)

    @property
    def integer_part(self) -> int:
        return next(iter(self.partial_quotients()))

    def fractional_bounds(self, bits: int) -> Tuple[int, int]:
        """Same enclosure for frac(alpha)"""
        lo, hi = self.fixed_bounds(bits)
        shift = self.integer_part << bits
        return lo - shift, hi - shift

    def value(self, prec: int = None) -> BallReal:
        """Ball enclosure of alpha at the requested precision"""
        prec = prec or get_default_precision()
        if self.rational is not None:
            return BallReal.exact(self.rational, prec)
        bits = prec + 16
        lo, hi = self.fixed_bounds(bits)
        return BallReal.from_fixed(lo, hi, bits, prec)


def _rational_quotients(value: Fraction) -> Iterator[int]:
    num, den = value.numerator, value.denominator
    while den:
        a = num // den
        yield a
        num, den = den, num - a * den


def _surd_quotients(a: int, b: int, c: int, d: int) -> Iterator[int]:
    # alpha = (P + sqrt(D)) / Q with Q | D - P^2
    if b < 0:
        a, b, c = -a, -b, -c
    P, D, Q = a, b * b * d, c
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    root = isqrt(D)
    while True:
        if Q > 0:
            digit = (P + root) // Q
        else:
            digit = -((P + root) // -Q + 1)
        yield digit
        P = digit * Q - P
        Q = (D - P * P) // Q


@lru_cache(maxsize=256)
def _fixed_bounds(alpha: AlphaSpec, bits: int) -> Tuple[int, int]:
    if alpha.rational is not None:
        scaled = alpha.rational * (1 << bits)
        return scaled.numerator // scaled.denominator, -((-scaled.numerator) // scaled.denominator)
    if alpha.kind is AlphaKind.QUADRATIC_SURD:
        a, b, c, d = alpha.surd
        if c < 0:
            a, b, c = -a, -b, -c
        root = isqrt(b * b * d << (2 * bits))
        low_root, high_root = (root, root + 1) if b > 0 else (-root - 1, -root)
        base = a << bits
        return (base + low_root) // c, -((-(base + high_root)) // c)
    # consecutive convergents bracket alpha once q_j * q_{j+1} exceeds 2**bits
    p_prev, q_prev, p, q = 0, 1, 1, 0
    target = 1 << bits
    for digit in alpha.partial_quotients():
        p_prev, q_prev, p, q = p, q, digit * p + p_prev, digit * q + q_prev
        if q_prev and q * q_prev > target:
            break
    lo, hi = sorted((Fraction(p_prev, q_prev), Fraction(p, q)))
    lo_scaled, hi_scaled = lo * target, hi * target
    return lo_scaled.numerator // lo_scaled.denominator, -((-hi_scaled.numerator) // hi_scaled.denominator)


def _parse_ints(text: str) -> Tuple[int, ...]:
    parts = [part.strip() for part in text.split(",") if part.strip()]
    try:
        return tuple(int(part) for part in parts)
    except ValueError as e:
        raise AlphaError(f"malformed integer list {text!r}") from e


@lru_cache(maxsize=64)
def parse_alpha(text: str) -> AlphaSpec:
    """
    Parse an alpha specification string

    Accepted forms: presets ("gold2", "silver"), "surd:a,b,c,d" for
    (a + b*sqrt(d))/c, "cf:a0,a1,...,(p1,...,pk)" with an optional repeating
    block in parentheses, and plain decimal literals (flagged unsafe).
    """
    source = text.strip()
    spec = PRESETS.get(source.lower(), source)
    if spec.startswith("surd:"):
        values = _parse_ints(spec[5:])
        if len(values) != 4:
            raise AlphaError(f"surd needs four integers a,b,c,d: {source!r}")
        a, b, c, d = values
        if c == 0 or d < 0:
            raise AlphaError(f"surd needs c != 0 and d >= 0: {source!r}")
        rational = None
        if b == 0 or isqrt(d) ** 2 == d:
            rational = Fraction(a + b * isqrt(d), c)
        return AlphaSpec(AlphaKind.QUADRATIC_SURD, source, surd=(a, b, c, d), rational=rational)
    if spec.startswith("cf:"):
        match = _CF_PATTERN.match(spec[3:])
        if not match:
            raise AlphaError(f"malformed continued fraction {source!r}")
        head = _parse_ints(match.group("head") or "")
        tail = _parse_ints(match.group("tail") or "")
        if not head and not tail:
            raise AlphaError(f"empty continued fraction {source!r}")
        if any(x <= 0 for x in chain(head[1:], tail)) or (not head and tail[0] <= 0):
            raise AlphaError(f"partial quotients after a0 must be positive: {source!r}")
        rational = None
        if not tail:
            rational = Fraction(0)
            for digit in reversed(head[1:]):
                rational = 1 / (digit + rational)
            rational += head[0]
        return AlphaSpec(AlphaKind.CONTINUED_FRACTION, source, head=head, tail=tail, rational=rational)
    try:
        value = Fraction(spec)
    except (ValueError, ZeroDivisionError) as e:
        raise AlphaError(f"unrecognised alpha specification {source!r}") from e
    return AlphaSpec(AlphaKind.DECIMAL, source, rational=value)


def first_terms(alpha: AlphaSpec, count: int) -> List[int]:
    """First partial quotients, used in metadata echoes"""
    return list(islice(alpha.partial_quotients(), count))
