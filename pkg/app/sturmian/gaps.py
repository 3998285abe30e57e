"""
Gap Atlas
The gaps I_n, point classification against them, delta(n) and the Sturmian sampler
"""

import sys
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple

from app.config import DEFAULT_CLASSIFY_DEPTH, DELTA_RELATIVE_BITS, MAX_PRECISION, get_default_precision
from app.core.alpha import AlphaSpec
from app.core.ball import BallReal, Ordering
from app.core.circle import CirclePoint, SturmianTag, circle_distance
from app.core.errors import PrecisionExhausted, UndecidableComparison
from app.sturmian.staircase import StaircaseContext, get_staircase_context, staircase_at_jump


class Verdict(Enum):
    IN_GAP = "in-gap"
    IN_K = "in-K"
    ON_BOUNDARY = "on-boundary"


@dataclass(frozen=True)
class GapClassification:
    """Location of a circle point relative to the gaps I_0..I_N and the Cantor set K"""
    verdict: Verdict
    index: int
    distance: Optional[BallReal] = None

    @classmethod
    def in_gap(cls, n: int, distance: BallReal) -> "GapClassification":
        return cls(Verdict.IN_GAP, n, distance)

    @classmethod
    def in_k(cls, depth: int) -> "GapClassification":
        return cls(Verdict.IN_K, depth)

    @classmethod
    def on_boundary(cls, n: int) -> "GapClassification":
        return cls(Verdict.ON_BOUNDARY, n)

    @property
    def in_gap_index(self) -> Optional[int]:
        return self.index if self.verdict is Verdict.IN_GAP else None


@dataclass(frozen=True)
class GapInterval:
    """I_n = pi((f(-n alpha), F(-n alpha))), an open arc of length 2^(-n-1)"""
    index: int
    left_lift: BallReal
    right_lift: BallReal

    @property
    def left(self) -> CirclePoint:
        return CirclePoint(self.left_lift)

    @property
    def right(self) -> CirclePoint:
        return CirclePoint(self.right_lift)

    @property
    def length(self) -> BallReal:
        return self.right_lift - self.left_lift

    @property
    def exact_length(self) -> Fraction:
        return Fraction(1, 1 << (self.index + 1))

    def point_at(self, theta: Fraction) -> CirclePoint:
        """Point at relative position theta in (0, 1) along the arc"""
        return CirclePoint(self.left_lift + Fraction(theta) * self.exact_length)

    def midpoint(self) -> CirclePoint:
        return self.point_at(Fraction(1, 2))


@dataclass(frozen=True)
class DeltaEntry:
    """delta(n) with the gap endpoint (k, side) that attains the minimum"""
    n: int
    value: BallReal
    argmin: Tuple[int, str]


class GapAtlas:
    """
    Cached gap endpoints for one (alpha, precision).

    Intervals are appended on demand and never modified afterwards; a
    single writer fills the cache, readers may share it.
    """

    def __init__(self, staircase: StaircaseContext):
        self.staircase = staircase
        self._intervals: List[GapInterval] = []
        self._delta: List[DeltaEntry] = []
        self._delta_escalated = False

    @property
    def alpha(self) -> AlphaSpec:
        return self.staircase.alpha

    @property
    def precision(self) -> int:
        return self.staircase.precision

    def interval(self, n: int) -> GapInterval:
        while len(self._intervals) <= n:
            k = len(self._intervals)
            f_value, F_value = staircase_at_jump(k, 0, self.staircase)
            self._intervals.append(GapInterval(k, f_value, F_value))
        return self._intervals[n]

    def intervals(self, depth: int) -> List[GapInterval]:
        """I_0 .. I_(depth-1)"""
        self.interval(depth - 1)
        return self._intervals[:depth]

    def escalated(self) -> Optional["GapAtlas"]:
        ctx = self.staircase.escalated()
        return None if ctx is None else get_gap_atlas(ctx.alpha, ctx.precision, ctx.max_precision)

    # -- delta ----------------------------------------------------------------

    def _boundary_distance(self, point: CirclePoint) -> BallReal:
        base = self.interval(0)
        return BallReal.minimum(
            circle_distance(point, base.left, self.precision),
            circle_distance(point, base.right, self.precision),
        )

    def _resolved(self, value: BallReal) -> bool:
        ctx = value.context
        return value.lower > 0 and value.rad <= ctx.ldexp(value.mid, -DELTA_RELATIVE_BITS)

    def _delta_entry(self, n: int) -> DeltaEntry:
        gap = self.interval(n)
        best = self._delta[-1] if self._delta else None
        for side, point in (("left", gap.left), ("right", gap.right)):
            candidate = self._boundary_distance(point) * 4
            if best is None or candidate.compare(best.value) is Ordering.LESS:
                best = DeltaEntry(n, candidate, (n, side))
            elif candidate.compare(best.value) is Ordering.UNDECIDABLE and candidate.mid < best.value.mid:
                best = DeltaEntry(n, BallReal.minimum(candidate, best.value), (n, side))
        return DeltaEntry(n, best.value, best.argmin)

    def delta_table(self, depth: int) -> List[DeltaEntry]:
        """
        delta(1) .. delta(depth)

        delta decays geometrically, so entries that this precision cannot
        separate from zero are taken from an escalated atlas.

        Raises:
            PrecisionExhausted: an entry stays unresolved at the precision cap
        """
        while len(self._delta) < depth:
            n = len(self._delta) + 1
            entry = self._delta_entry(n)
            if not self._resolved(entry.value):
                finer = self.escalated()
                if finer is None:
                    raise PrecisionExhausted(f"delta({n}) = {entry.value!r} unresolved at {self.precision} bits")
                if not self._delta_escalated:
                    print(f"[Gaps] WARNING: delta({n}) unresolved at {self.precision} bits, using {finer.precision}",
                          file=sys.stderr)
                    self._delta_escalated = True
                resolved = finer.delta_table(n)[n - 1]
                entry = DeltaEntry(n, resolved.value.with_precision(self.precision), resolved.argmin)
            self._delta.append(entry)
        return self._delta[:depth]


@lru_cache(maxsize=32)
def get_gap_atlas(alpha: AlphaSpec, precision: int = None, max_precision: int = MAX_PRECISION) -> GapAtlas:
    """Shared atlas per (alpha, precision)"""
    return GapAtlas(get_staircase_context(alpha, precision or get_default_precision(), max_precision))


def _scan(x: CirclePoint, atlas: GapAtlas, max_depth: int) -> GapClassification:
    point = x.ball(atlas.precision)
    for n in range(max_depth + 1):
        gap = atlas.interval(n)
        diff = point - gap.left_lift
        try:
            offset = diff - diff.floor()
        except UndecidableComparison:
            return GapClassification.on_boundary(n)
        length = gap.exact_length
        order = offset.compare(length)
        if order is Ordering.LESS:
            return GapClassification.in_gap(n, BallReal.minimum(offset, length - offset))
        if order is Ordering.UNDECIDABLE:
            return GapClassification.on_boundary(n)
    return GapClassification.in_k(max_depth)


def classify(x: CirclePoint, atlas: GapAtlas, max_depth: int = DEFAULT_CLASSIFY_DEPTH) -> GapClassification:
    """
    Locate x relative to I_0 .. I_max_depth, scanning gaps by decreasing length

    Exact and tagged points are retried at doubled precision before a
    boundary verdict is returned.
    """
    current = atlas
    while True:
        result = _scan(x, current, max_depth)
        if result.verdict is not Verdict.ON_BOUNDARY or not (x.is_exact or x.is_tagged):
            return result
        current = current.escalated()
        if current is None:
            return result


def delta(n: int, atlas: GapAtlas) -> BallReal:
    """delta(n) = min over k <= n and endpoints e of I_k of 4 d(e, boundary of I_0)"""
    if n < 1:
        raise ValueError("delta is defined for n >= 1")
    return atlas.delta_table(n)[n - 1].value


def sample_sturmian(u: Fraction, ctx: StaircaseContext) -> CirclePoint:
    """pi(F(u)); the push-forward of uniform u is the Sturmian measure"""
    return CirclePoint(tag=SturmianTag(ctx.alpha, Fraction(u) % 1))


def draw_uniform(rng, bits: int = 53) -> Fraction:
    """Dyadic rational drawn uniformly from [0, 1) with a numpy Generator"""
    return Fraction(int(rng.integers(0, 1 << bits)), 1 << bits)


def gap_interval(n: int, atlas: GapAtlas) -> GapInterval:
    return atlas.interval(n)
