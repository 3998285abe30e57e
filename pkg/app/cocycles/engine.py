"""
Cocycle Engine
Cocycle products along orbits and the Lyapunov exponent estimators
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from app.config import REDUCTION_BLOCK, TRACE_TOLERANCE, get_default_precision
from app.cocycles.matrices import Mat2
from app.core.alpha import AlphaSpec
from app.core.circle import CirclePoint, doubling, rotate
from app.core.errors import NotPeriodic


class Mode(Enum):
    DOUBLE = "double"
    BALL = "ball"


class BaseMap(Enum):
    DOUBLING = "doubling"
    ROTATION = "rotation"


Generator = Callable[[CirclePoint, Mode, int], Mat2]
BatchGenerator = Callable[[np.ndarray], np.ndarray]


@dataclass
class CocycleSpec:
    """
    A linear cocycle (T, A).

    generator evaluates A at a circle point in the requested mode; batch,
    when present, evaluates A on an array of float base points and returns
    an (m, 2, 2) array (rotation specs only).
    """
    name: str
    generator: Generator
    base: BaseMap
    alpha: Optional[AlphaSpec] = None
    batch: Optional[BatchGenerator] = None

    def step(self, x: CirclePoint, prec: int = None) -> CirclePoint:
        if self.base is BaseMap.DOUBLING:
            return doubling(x)
        return rotate(x, self.alpha, prec=prec)

    def evaluate(self, x: CirclePoint, mode: Mode = Mode.DOUBLE, prec: int = None) -> Mat2:
        return self.generator(x, mode, prec or get_default_precision())


@dataclass(frozen=True)
class ExponentEstimate:
    """Top exponent by vector tracking and by the QR frame, plus the frame's second exponent"""
    vector: float
    qr: float
    second: float
    iterations: int

    @property
    def value(self) -> float:
        return self.qr

    @property
    def disagreement(self) -> float:
        return abs(self.vector - self.qr)


@dataclass(frozen=True)
class KingmanEstimate:
    """Monte-Carlo mean of (1/n) log ||A^(n)|| with its standard error"""
    n: int
    samples: int
    mean: float
    stderr: float


def _float_orbit(spec: CocycleSpec, x0: CirclePoint, start: int, stop: int) -> np.ndarray:
    steps = np.arange(start, stop, dtype=np.float64)
    return np.mod(float(x0) + steps * spec.alpha.float_value, 1.0)


def product(spec: CocycleSpec, x: CirclePoint, n: int, mode: Mode = Mode.DOUBLE, prec: int = None) -> Mat2:
    """
    A^(n)(x) = A(T^(n-1) x) ... A(x); the empty product is the identity

    Double mode rescales entries into log_scale as they grow.
    """
    if n < 0:
        raise ValueError("product length must be nonnegative")
    prec = prec or get_default_precision()
    if mode is Mode.DOUBLE and spec.batch is not None and spec.base is BaseMap.ROTATION and n > 0:
        mats = spec.batch(_float_orbit(spec, x, 0, n))
        result = Mat2.identity()
        for k in range(n):
            result = Mat2.from_array(mats[k]) @ result
        return result
    result = Mat2.identity(ball=mode is Mode.BALL, prec=prec)
    point = x
    for _ in range(n):
        result = spec.evaluate(point, mode, prec) @ result
        point = spec.step(point, prec)
    return result


def orbit_matrices(spec: CocycleSpec, x0: CirclePoint, start: int, stop: int, cursor: List[CirclePoint]) -> np.ndarray:
    """Double-mode matrices A(T^k x0) for start <= k < stop as an array"""
    if spec.batch is not None and spec.base is BaseMap.ROTATION:
        return spec.batch(_float_orbit(spec, x0, start, stop))
    mats = np.empty((stop - start, 2, 2))
    point = cursor[0]
    for k in range(stop - start):
        mats[k] = spec.evaluate(point, Mode.DOUBLE).to_array()
        point = spec.step(point)
    cursor[0] = point
    return mats


def reduce_blocks(mats: np.ndarray, block: int = REDUCTION_BLOCK) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pairwise tree reduction of consecutive matrices into block products

    Args:
        mats: (m, 2, 2) array in time order, m a multiple of block
        block: Power of two

    Returns:
        (m/block, 2, 2) normalised block products and their log scales
    """
    current = np.array(mats, dtype=np.float64)
    logs = np.zeros(len(current))
    width = 1
    while width < block:
        current = current[1::2] @ current[0::2]
        scale = np.abs(current).max(axis=(1, 2))
        current = current / scale[:, None, None]
        logs = logs[0::2] + logs[1::2] + np.log(scale)
        width *= 2
    return current, logs


class _Tracker:
    """Sequential vector and QR-frame tracking over block products"""

    def __init__(self):
        theta = 0.3
        self.v = (math.cos(theta), math.sin(theta))
        self.q1, self.q2 = (1.0, 0.0), (0.0, 1.0)
        self.log_vector = 0.0
        self.log_first = 0.0
        self.log_det = 0.0

    def push(self, m: np.ndarray, log_scale: float):
        a, b, c, d = float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1])
        vx, vy = a * self.v[0] + b * self.v[1], c * self.v[0] + d * self.v[1]
        size = math.hypot(vx, vy)
        self.v = (vx / size, vy / size)
        self.log_vector += math.log(size) + log_scale

        w1 = (a * self.q1[0] + b * self.q1[1], c * self.q1[0] + d * self.q1[1])
        w2 = (a * self.q2[0] + b * self.q2[1], c * self.q2[0] + d * self.q2[1])
        r11 = math.hypot(*w1)
        q1 = (w1[0] / r11, w1[1] / r11)
        proj = q1[0] * w2[0] + q1[1] * w2[1]
        u2 = (w2[0] - proj * q1[0], w2[1] - proj * q1[1])
        r22 = math.hypot(*u2)
        self.q1, self.q2 = q1, (u2[0] / r22, u2[1] / r22)
        self.log_first += math.log(r11) + log_scale

    def push_determinants(self, mats: np.ndarray):
        # r11 * r22 = |det| of the product, taken from the unreduced steps
        self.log_det += float(np.sum(np.log(np.abs(np.linalg.det(mats)))))

    @property
    def log_second(self) -> float:
        return self.log_det - self.log_first


def birkhoff_exponent(spec: CocycleSpec, x0: CirclePoint, N: int, block: int = REDUCTION_BLOCK,
                      chunk_blocks: int = 1024) -> ExponentEstimate:
    """
    (1/N) log of the top singular growth along the orbit of x0

    Matrices are generated in chunks, reduced pairwise into blocks, then
    tracked sequentially with a unit vector and with an orthonormal frame.
    The raw product is never formed.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    tracker = _Tracker()
    cursor = [x0]
    chunk = block * chunk_blocks
    for start in range(0, N, chunk):
        stop = min(start + chunk, N)
        mats = orbit_matrices(spec, x0, start, stop, cursor)
        tracker.push_determinants(mats)
        pad = (-len(mats)) % block
        if pad:
            mats = np.concatenate([mats, np.broadcast_to(np.eye(2), (pad, 2, 2))])
        blocks, logs = reduce_blocks(mats, block)
        for m, log_scale in zip(blocks, logs):
            tracker.push(m, float(log_scale))
    return ExponentEstimate(tracker.log_vector / N, tracker.log_first / N, tracker.log_second / N, N)


def _is_cycle(spec: CocycleSpec, orbit: Sequence[CirclePoint]) -> bool:
    k = len(orbit)
    return all(spec.step(orbit[i]) == orbit[(i + 1) % k] for i in range(k))


def spectral_exponent(matrix: Mat2, period: int) -> float:
    """(1/k) log of the spectral radius; exactly 0 for SL(2) products with |trace| <= 2"""
    tr = float(matrix.trace())
    det = float(matrix.det())
    s = matrix.log_scale
    log_norm = math.log(float(matrix.norm())) + s
    if det > 0 and abs(math.log(det) + 2 * s) <= 1e-6:
        # unimodular: det of the scaled entries is e^(-2s)
        slack = TRACE_TOLERANCE * math.exp(min(max(log_norm, 0.0), 40.0))
        if tr == 0 or math.log(abs(tr)) + s <= math.log(2.0 + slack):
            return 0.0
        scaled_det = math.exp(-2 * s) if s < 350 else 0.0
        disc = max(tr * tr - 4 * scaled_det, 0.0)
        return (math.log(0.5 * (abs(tr) + math.sqrt(disc))) + s) / period
    disc = tr * tr - 4 * det
    if disc <= 0:
        return (0.5 * math.log(abs(det)) + s) / period if det else -math.inf
    return (math.log(0.5 * (abs(tr) + math.sqrt(disc))) + s) / period


def periodic_exponent(spec: CocycleSpec, orbit: Sequence[CirclePoint]) -> float:
    """
    Exponent of the periodic measure on a cycle of the base map

    Raises:
        NotPeriodic: orbit is not a cycle of spec's base map
    """
    if not orbit:
        raise NotPeriodic("empty orbit")
    if not _is_cycle(spec, orbit):
        raise NotPeriodic(f"orbit of length {len(orbit)} is not a cycle of {spec.base.value}")
    result = Mat2.identity()
    for point in orbit:
        result = spec.evaluate(point, Mode.DOUBLE) @ result
    return spectral_exponent(result, len(orbit))


def kingman_upper_bound(spec: CocycleSpec, sampler: Callable[[np.random.Generator], CirclePoint], n: int,
                        samples: int, rng: np.random.Generator) -> KingmanEstimate:
    """Monte-Carlo estimate of (1/n) E log ||A^(n)|| under the sampler's measure"""
    if n < 1:
        raise ValueError("n must be at least 1")
    values = np.array([product(spec, sampler(rng), n).log_norm() / n for _ in range(samples)])
    stderr = float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else math.inf
    return KingmanEstimate(n, samples, float(values.mean()), stderr)
