"""
Gap Traversal
Direct verification of the product bound for a point crossing the gap tower I_n -> ... -> I_0 -> I_m
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from app.config import BOUND_TOLERANCE
from app.cocycles.engine import product
from app.cocycles.families import AssembledCocycle
from app.core.circle import CirclePoint, doubling
from app.core.errors import LabError
from app.sturmian.gaps import Verdict, classify, draw_uniform
from app.sturmian.modulation import ell, phi_of_classification


def block_split(n: int, root: int = 4) -> List[Tuple[int, int, int]]:
    """
    Gap indices 0..n grouped by ell: (j, first, stop) with ell(k) = j on [first, stop)

    The boundaries are 0, j^4 - 2 for 2 <= j <= ell(n), and n + 1.
    """
    s = ell(n, root)
    starts = [0] + [j ** root - 2 for j in range(2, s + 1)]
    stops = starts[1:] + [n + 1]
    return [(j, first, stop) for j, (first, stop) in enumerate(zip(starts, stops), start=1)]


@dataclass(frozen=True)
class BlockNorm:
    j: int
    first: int
    stop: int
    log_norm: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.log_norm <= self.bound + BOUND_TOLERANCE


@dataclass(frozen=True)
class TraversalSample:
    x: float
    t: float
    log_norm: float
    blocks: List[BlockNorm]


@dataclass
class TraversalReport:
    n: int
    m: int
    bound: float
    isolation: float
    samples: List[TraversalSample] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)

    @property
    def worst(self) -> float:
        return max((sample.log_norm for sample in self.samples), default=-math.inf)

    @property
    def holds(self) -> bool:
        return all(
            sample.log_norm <= self.bound + BOUND_TOLERANCE and all(block.holds for block in sample.blocks)
            for sample in self.samples
        )

    def split(self) -> List[Tuple[int, int, int]]:
        return [(block.j, block.first, block.stop) for block in self.samples[0].blocks] if self.samples else []


def _tower_point(assembled: AssembledCocycle, n: int, m: int, theta: Fraction) -> Optional[CirclePoint]:
    """x in I_n with D^n x in I_0 and D^(n+1) x at relative position theta in I_m"""
    atlas = assembled.atlas
    prec = atlas.precision
    z = atlas.interval(m).point_at(theta)
    base = atlas.interval(0)
    for candidate in (z.ball(prec).mul_pow2(-1), z.ball(prec).mul_pow2(-1) + Fraction(1, 2)):
        w = CirclePoint(candidate)
        if classify(w, atlas, 0).verdict is Verdict.IN_GAP:
            offset = (w.ball(prec) - base.left_lift).frac()
            return CirclePoint(atlas.interval(n).left_lift + offset.mul_pow2(-n))
    return None


def verify_gap_traversal(assembled: AssembledCocycle, n: int, m: int, samples: int,
                         rng: Optional[np.random.Generator] = None) -> TraversalReport:
    """
    Sample x in I_n with D^(n+1) x in I_m and check log ||A^(n+1)(x)|| <= epsilon sqrt((n+m+2)/2)

    Each sample also reports the product over every ell-block of the tower
    against M(t/j), where t = phi(x) is constant along the tower.

    Returns:
        TraversalReport; points that could not be placed are listed under
        failures rather than raised
    """
    if n < 0 or m < 0:
        raise ValueError("gap indices must be nonnegative")
    rng = rng or np.random.default_rng(0)
    epsilon = assembled.modulation.epsilon
    report = TraversalReport(n, m, epsilon * math.sqrt((n + m + 2) / 2), isolation_floor(assembled, m))
    spec = assembled.spec
    atlas = assembled.atlas
    root = assembled.modulation.root
    splits = block_split(n, root)

    for _ in range(samples):
        theta = draw_uniform(rng)
        if theta == 0:
            theta = Fraction(1, 2)
        try:
            x = _tower_point(assembled, n, m, theta)
            if x is None:
                report.failures.append(f"theta={theta}: no preimage of the I_{m} point in I_0")
                continue
            located = classify(x, atlas, n)
            if located.verdict is not Verdict.IN_GAP or located.index != n:
                report.failures.append(f"theta={theta}: sample left I_{n} ({located.verdict.value})")
                continue
            t = float(phi_of_classification(located))
            log_norm = product(spec, x, n + 1).log_norm()

            blocks: List[BlockNorm] = []
            for j, first, stop in splits:
                # gap index k is visited at time n - k
                start = x
                for _ in range(n - stop + 1):
                    start = doubling(start)
                block_log = product(spec, start, stop - first).log_norm()
                ratio = t / j if assembled.modulated else t
                bound = assembled.control_value(ratio) if ratio > 0 else 0.0
                blocks.append(BlockNorm(j, first, stop, block_log, bound))
            report.samples.append(TraversalSample(float(x), t, log_norm, blocks))
        except LabError as e:
            report.failures.append(f"theta={theta}: {e}")
    return report


def isolation_floor(assembled: AssembledCocycle, m: int) -> float:
    """delta(m+1) as a float: the smallest phi on points of I_n that land in I_m"""
    return float(assembled.atlas.delta_table(m + 1)[m].value)
