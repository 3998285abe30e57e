"""
Periodic Orbits
Necklace enumeration of doubling-map cycles, mechanical orbits and orbit frequencies
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence

import numpy as np

from app.config import DEFAULT_PERIOD_CAP
from app.core.circle import CirclePoint, doubling
from app.core.errors import CapExceeded, OnBoundary
from app.sturmian.gaps import GapAtlas, GapClassification, Verdict, classify
from app.sturmian.staircase import StaircaseContext, staircase_F


@dataclass(frozen=True)
class PeriodicOrbit:
    """
    A cycle of the doubling map given by its binary itinerary.

    word is one period of the binary expansion of the base point, so the
    base point is int(word, 2)/(2^k - 1) and D^k(base) = base exactly.
    """
    orbit_id: str
    word: str
    base: Fraction
    points: List[CirclePoint] = field(compare=False, repr=False)

    @property
    def period(self) -> int:
        return len(self.word)

    @classmethod
    def from_word(cls, word: str, orbit_id: Optional[str] = None) -> "PeriodicOrbit":
        if not word or set(word) - {"0", "1"}:
            raise ValueError(f"orbit word must be a nonempty binary string, got {word!r}")
        k = len(word)
        base = Fraction(int(word, 2), (1 << k) - 1) % 1
        points = [CirclePoint(base)]
        for _ in range(k - 1):
            points.append(doubling(points[-1]))
        return cls(orbit_id or f"{k}:{word}", word, base, points)


def lyndon_words(max_length: int) -> Iterator[str]:
    """Binary Lyndon words of length <= max_length in lexicographic order (Duval)"""
    word = [-1]
    while word:
        word[-1] += 1
        yield "".join(str(digit) for digit in word)
        m = len(word)
        while len(word) < max_length:
            word.append(word[-m])
        while word and word[-1] == 1:
            word.pop()


def enumerate_orbits(max_period: int, cap: int = DEFAULT_PERIOD_CAP) -> List[PeriodicOrbit]:
    """
    One orbit per binary necklace of length <= max_period, sorted by (period, word)

    The word "1" names the point 1, which is 0 on the circle, so it is skipped.

    Raises:
        CapExceeded: max_period is above cap
    """
    if max_period < 1:
        raise ValueError("max_period must be at least 1")
    if max_period > cap:
        raise CapExceeded(f"max_period {max_period} exceeds the cap {cap}")
    words = [word for word in lyndon_words(max_period) if word != "1"]
    words.sort(key=lambda word: (len(word), word))
    return [PeriodicOrbit.from_word(word) for word in words]


def necklace_count(k: int) -> int:
    """Number of binary necklaces of exact period k (aperiodic ones)"""
    total = 0
    for d in range(1, k + 1):
        if k % d == 0:
            total += _mobius(k // d) * (1 << d)
    return total // k


def _mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def mechanical_word(p: int, q: int) -> str:
    """Lower mechanical word of slope p/q: w_n = floor((n+1)p/q) - floor(np/q), n < q"""
    return "".join(str((n + 1) * p // q - n * p // q) for n in range(q))


def mechanical_orbit(slope: Fraction) -> PeriodicOrbit:
    """Period-q orbit whose itinerary is the lower mechanical word of slope p/q"""
    slope = Fraction(slope)
    p, q = slope.numerator, slope.denominator
    if not 0 < p < q:
        raise ValueError(f"mechanical orbits need 0 < p/q < 1, got {slope}")
    return PeriodicOrbit.from_word(mechanical_word(p, q), orbit_id=f"mech:{p}/{q}")


def classify_orbit(orbit: PeriodicOrbit, atlas: GapAtlas, max_depth: int) -> List[GapClassification]:
    """
    Gap classification of every orbit point

    Raises:
        OnBoundary: an orbit point could not be separated from a gap endpoint
    """
    results = []
    for point in orbit.points:
        result = classify(point, atlas, max_depth)
        if result.verdict is Verdict.ON_BOUNDARY:
            raise OnBoundary(result.index)
        results.append(result)
    return results


def base_gap_frequency(orbit: PeriodicOrbit, atlas: GapAtlas, max_depth: int) -> Fraction:
    """mu(I_0) for the periodic measure on orbit, exactly"""
    hits = sum(1 for result in classify_orbit(orbit, atlas, max_depth) if result.in_gap_index == 0)
    return Fraction(hits, orbit.period)


# -- weak-* proxy ----------------------------------------------------------------

TRIG_MODES = 8


def sturmian_moments(ctx: StaircaseContext, samples: int = 1024, modes: int = TRIG_MODES) -> np.ndarray:
    """
    Fourier coefficients of the Sturmian measure for frequencies 1..modes

    nu is the push-forward of Lebesgue under pi(F), integrated by the
    midpoint rule in u.
    """
    points = np.array([float(staircase_F(Fraction(2 * i + 1, 2 * samples), ctx)) % 1.0 for i in range(samples)])
    freqs = np.arange(1, modes + 1)
    return np.exp(2j * np.pi * np.outer(freqs, points)).mean(axis=1)


def orbit_moments(orbit: PeriodicOrbit, modes: int = TRIG_MODES) -> np.ndarray:
    points = np.array([float(point) for point in orbit.points])
    freqs = np.arange(1, modes + 1)
    return np.exp(2j * np.pi * np.outer(freqs, points)).mean(axis=1)


def weak_distance_proxy(orbit: PeriodicOrbit, nu_moments: Sequence[complex]) -> float:
    """sum_k |mu^(k) - nu^(k)| / k over the fixed trigonometric test functions"""
    nu_moments = np.asarray(nu_moments)
    diff = np.abs(orbit_moments(orbit, len(nu_moments)) - nu_moments)
    return float((diff / np.arange(1, len(nu_moments) + 1)).sum())


def orbit_summary(orbit: PeriodicOrbit) -> Dict[str, object]:
    return {"orbit_id": orbit.orbit_id, "period": orbit.period, "word": orbit.word, "base": str(orbit.base)}
