"""
Hitting Decomposition
Hitting times of I_0 along periodic orbits and the block-by-block exponent bound
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List

from app.config import BOUND_TOLERANCE
from app.cocycles.families import AssembledCocycle
from app.cocycles.matrices import Mat2
from app.lab.orbits import PeriodicOrbit, classify_orbit


@dataclass(frozen=True)
class HittingBlock:
    """Excursion i: x_i = D^(k_i+1) x lies in I_(n_i - 1), a_i = (n_i + n_(i+1))/2"""
    index: int
    start: int
    length: int
    a: Fraction
    log_norm: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.log_norm <= self.bound + BOUND_TOLERANCE


@dataclass(frozen=True)
class ChainEntry:
    """log ||A^(k_j+1)(x)|| against C + epsilon sqrt(j) sqrt(a_0 + ... + a_(j-1))"""
    j: int
    log_norm: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.log_norm <= self.bound + BOUND_TOLERANCE


@dataclass(frozen=True)
class HittingDecomposition:
    orbit_id: str
    period: int
    hitting_times: List[int]
    blocks: List[HittingBlock]
    chain: List[ChainEntry]
    frequency: Fraction
    head: float

    @property
    def holds(self) -> bool:
        return all(block.holds for block in self.blocks) and all(entry.holds for entry in self.chain)

    def worst_chain_margin(self) -> float:
        return min((entry.bound - entry.log_norm for entry in self.chain), default=math.inf)


def decompose_hitting(assembled: AssembledCocycle, orbit: PeriodicOrbit, periods: int = 3) -> HittingDecomposition:
    """
    Unroll `periods` periods of orbit and decompose the product at the hitting times of I_0

    Every excursion between consecutive hits is a gap traversal, bounded by
    epsilon sqrt(a_i); the running products are checked against the summed
    form of those bounds.
    """
    if periods < 2:
        raise ValueError("at least two periods are needed to close the last excursion")
    k = orbit.period
    depth = assembled.modulation.classify_depth
    verdicts = classify_orbit(orbit, assembled.atlas, depth)
    matrices = [assembled.evaluate(point) for point in orbit.points]
    epsilon = assembled.modulation.epsilon
    total = periods * k

    hits = [i for i in range(total) if verdicts[i % k].in_gap_index == 0]
    frequency = Fraction(sum(1 for v in verdicts if v.in_gap_index == 0), k)
    if not hits:
        raise ValueError(f"orbit {orbit.orbit_id} never enters I_0")

    # prefix[i] = A^(i)(x)
    prefix = [Mat2.identity()]
    for i in range(total):
        prefix.append(matrices[i % k] @ prefix[-1])

    def segment(start: int, length: int) -> Mat2:
        result = Mat2.identity()
        for i in range(start, start + length):
            result = matrices[i % k] @ result
        return result

    lengths = [hits[i + 1] - hits[i] for i in range(len(hits) - 1)]
    blocks: List[HittingBlock] = []
    for i in range(len(lengths) - 1):
        a = Fraction(lengths[i] + lengths[i + 1], 2)
        log_norm = segment(hits[i] + 1, lengths[i]).log_norm()
        blocks.append(HittingBlock(i, hits[i] + 1, lengths[i], a, log_norm, epsilon * math.sqrt(a)))

    head = prefix[hits[0] + 1].log_norm()
    chain: List[ChainEntry] = []
    running = Fraction(0)
    for j, block in enumerate(blocks, start=1):
        running += block.a
        bound = head + epsilon * math.sqrt(j) * math.sqrt(running)
        chain.append(ChainEntry(j, prefix[hits[j] + 1].log_norm(), bound))

    return HittingDecomposition(orbit.orbit_id, k, hits, blocks, chain, frequency, head)
