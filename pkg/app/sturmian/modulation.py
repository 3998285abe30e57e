"""
Modulation Layer
ell(n), the gap profile phi, its damped version psi and the decreasing function M
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import List, Optional, Union

import numpy as np

from app.config import DEFAULT_CLASSIFY_DEPTH, DEFAULT_CONTROL_DEPTH, DEFAULT_EPSILON
from app.core.ball import BallReal
from app.core.circle import CirclePoint
from app.core.errors import CapExceeded, DepthExceeded, OnBoundary
from app.sturmian.gaps import GapAtlas, GapClassification, Verdict, classify

INTERPOLATION_RULE = "log-linear"


def integer_root(value: int, k: int) -> int:
    """floor(value ** (1/k)) in integer arithmetic"""
    if value < 0:
        raise ValueError("integer_root needs a nonnegative value")
    if k == 2:
        return isqrt(value)
    if k == 4:
        return isqrt(isqrt(value))
    lo, hi = 0, 1
    while hi ** k <= value:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid ** k <= value:
            lo = mid
        else:
            hi = mid
    return lo


def ell(n: int, root: int = 4) -> int:
    """ell(n) = floor((n + 2) ** (1/root)); root 4 is the construction's choice"""
    if n < 0:
        raise ValueError("ell is defined for n >= 0")
    return integer_root(n + 2, root)


@dataclass(frozen=True)
class ControlPoint:
    """Node (t_n, v_n) of M; t_float is t_n rounded toward zero"""
    n: int
    t: BallReal
    t_float: float
    v: float
    tied: bool


class ModulationContext:
    """
    Parameters of the modulation layer.

    Control points are t_n = delta(n+1)/ell(n) and
    v_n = epsilon (n+2)^(1/4)/sqrt(2). Equal consecutive t_n occur whenever
    delta stalls while ell is constant; M interpolates through the first
    node of each run, so M(t_n) <= v_n holds at every n and with equality
    at the interpolated nodes.
    """

    def __init__(self, atlas: GapAtlas, epsilon: float = DEFAULT_EPSILON, depth: int = DEFAULT_CONTROL_DEPTH,
                 classify_depth: int = DEFAULT_CLASSIFY_DEPTH, root: int = 4):
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        self.atlas = atlas
        self.epsilon = epsilon
        self.depth = depth
        self.classify_depth = classify_depth
        self.root = root
        self.interpolation = INTERPOLATION_RULE
        self.control_points = self._build_control_points()
        nodes = [point for point in self.control_points if not point.tied]
        self._log_nodes = np.array([0.0] + [-math.log(point.t_float) for point in nodes])
        self._values = np.array([0.0] + [point.v for point in nodes])
        self.t_min = self.control_points[-1].t_float

    def _build_control_points(self) -> List[ControlPoint]:
        deltas = self.atlas.delta_table(self.depth + 1)
        points: List[ControlPoint] = []
        for n in range(self.depth + 1):
            t_ball = deltas[n].value / ell(n, self.root)
            t_float = math.nextafter(float(t_ball.lower), 0.0)
            if t_float <= 0.0:
                raise CapExceeded(f"control point t_{n} = {t_ball!r} is below double range; lower the depth")
            v = self.epsilon * (n + 2) ** 0.25 / math.sqrt(2)
            tied = bool(points) and t_float >= points[-1].t_float
            if tied:
                t_float = points[-1].t_float
            points.append(ControlPoint(n, t_ball, t_float, v, tied))
        return points

    def extended(self, depth: int) -> "ModulationContext":
        return ModulationContext(self.atlas, self.epsilon, depth, self.classify_depth, self.root)

    # -- M ----------------------------------------------------------------------

    def _interp(self, t: float) -> float:
        if t > 1.0:
            raise ValueError(f"M is defined on (0, 1], got {t!r}")
        if t < self.t_min:
            raise DepthExceeded(t, self.t_min)
        return float(np.interp(-math.log(t), self._log_nodes, self._values))

    def M(self, t: Union[float, BallReal]) -> Union[float, BallReal]:
        """
        Continuous strictly decreasing M with M(1) = 0 through the control points

        Floats give a float; balls give the image enclosure [M(upper), M(lower)].

        Raises:
            DepthExceeded: t lies below the last control point
        """
        if isinstance(t, BallReal):
            low = math.nextafter(float(t.lower), 0.0)
            high = min(math.nextafter(float(t.upper), math.inf), 1.0)
            return BallReal.from_interval(Fraction(self._interp(high)), Fraction(self._interp(low)), t.prec)
        return self._interp(float(t))

    def M_array(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t_min):
            raise DepthExceeded(float(t.min()), self.t_min)
        return np.interp(-np.log(t), self._log_nodes, self._values)


def M_of(t: Union[float, BallReal], modulation: ModulationContext) -> Union[float, BallReal]:
    return modulation.M(t)


def phi_of_classification(result: GapClassification) -> BallReal:
    """phi from a classification: 2^(n+2) d(x, boundary of I_n) on I_n, 0 on K"""
    if result.verdict is Verdict.ON_BOUNDARY:
        raise OnBoundary(result.index)
    if result.verdict is Verdict.IN_K:
        return BallReal(0)
    return result.distance.mul_pow2(result.index + 2)


def phi(x: CirclePoint, modulation: ModulationContext) -> BallReal:
    """Gap profile phi(x) in [0, 1]"""
    return phi_of_classification(classify(x, modulation.atlas, modulation.classify_depth))


def psi(x: CirclePoint, modulation: ModulationContext, truncate: Optional[int] = None) -> BallReal:
    """
    psi(x) = phi(x)/ell(n) on I_n and 0 on K

    Args:
        truncate: When given, gaps of index above it are zeroed (psi_n)
    """
    result = classify(x, modulation.atlas, modulation.classify_depth)
    value = phi_of_classification(result)
    if result.verdict is not Verdict.IN_GAP:
        return value
    if truncate is not None and result.index > truncate:
        return BallReal(0)
    return value / ell(result.index, modulation.root)


def build_modulation(atlas: GapAtlas, epsilon: float = DEFAULT_EPSILON, depth: int = DEFAULT_CONTROL_DEPTH) -> ModulationContext:
    return ModulationContext(atlas, epsilon, depth)
