"""
2x2 Matrices
Mat2 over doubles or balls, with log-scale accumulation and the exact spectral norm
"""

import math
from typing import Union

import numpy as np

from app.core.ball import BallReal

Entry = Union[float, BallReal]

# entries are rescaled once they exceed this magnitude in double mode
RESCALE_THRESHOLD = 1e150


class Mat2:
    """
    A 2x2 real matrix e^log_scale * [[a, b], [c, d]].

    Entries are floats (double mode) or BallReal (ball mode). log_scale is
    only ever nonzero in double mode, where long products are renormalised.
    """

    __slots__ = ("a", "b", "c", "d", "log_scale", "_det")

    def __init__(self, a: Entry, b: Entry, c: Entry, d: Entry, log_scale: float = 0.0):
        self.a, self.b, self.c, self.d = a, b, c, d
        self.log_scale = log_scale
        self._det = None

    @classmethod
    def identity(cls, ball: bool = False, prec: int = None) -> "Mat2":
        if ball:
            one, zero = BallReal.exact(1, prec), BallReal.exact(0, prec)
            return cls(one, zero, zero, one)
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def diag(cls, x: Entry, y: Entry) -> "Mat2":
        zero = BallReal.exact(0, x.prec) if isinstance(x, BallReal) else 0.0
        return cls(x, zero, zero, y)

    @classmethod
    def from_array(cls, array: np.ndarray, log_scale: float = 0.0) -> "Mat2":
        return cls(float(array[0, 0]), float(array[0, 1]), float(array[1, 0]), float(array[1, 1]), log_scale)

    @property
    def is_ball(self) -> bool:
        return isinstance(self.a, BallReal)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        result = Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.log_scale + other.log_scale,
        )
        return result.renormalized() if not result.is_ball else result

    def __sub__(self, other: "Mat2") -> "Mat2":
        if self.log_scale or other.log_scale:
            raise ValueError("subtraction needs unscaled matrices")
        return Mat2(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d, self.log_scale)

    def scaled(self, factor: Entry) -> "Mat2":
        return Mat2(self.a * factor, self.b * factor, self.c * factor, self.d * factor, self.log_scale)

    def renormalized(self) -> "Mat2":
        peak = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        if peak < RESCALE_THRESHOLD:
            return self
        return Mat2(self.a / peak, self.b / peak, self.c / peak, self.d / peak, self.log_scale + math.log(peak))

    # -- invariants -------------------------------------------------------------

    def det(self) -> Entry:
        """Determinant of the entry matrix (excluding e^(2 log_scale))"""
        if self._det is None:
            self._det = self.a * self.d - self.b * self.c
        return self._det

    def trace(self) -> Entry:
        return self.a + self.d

    def norm(self) -> Entry:
        """Spectral norm of the entry matrix: (|(a+d, b-c)| + |(a-d, b+c)|)/2"""
        if self.is_ball:
            p = ((self.a + self.d) * (self.a + self.d) + (self.b - self.c) * (self.b - self.c)).sqrt()
            q = ((self.a - self.d) * (self.a - self.d) + (self.b + self.c) * (self.b + self.c)).sqrt()
            return (p + q).mul_pow2(-1)
        return 0.5 * (math.hypot(self.a + self.d, self.b - self.c) + math.hypot(self.a - self.d, self.b + self.c))

    def log_norm(self) -> float:
        """log of the spectral norm of the full matrix"""
        return math.log(float(self.norm())) + self.log_scale

    def max_abs(self) -> Entry:
        if self.is_ball:
            best = abs(self.a)
            for entry in (self.b, self.c, self.d):
                best = BallReal.hull(best, abs(entry)) if best.overlaps(abs(entry)) else (
                    abs(entry) if abs(entry).definitely_greater(best) else best)
            return best
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def to_array(self) -> np.ndarray:
        return np.array([[float(self.a), float(self.b)], [float(self.c), float(self.d)]])

    def __repr__(self) -> str:
        scale = f", log_scale={self.log_scale:.6g}" if self.log_scale else ""
        return f"Mat2([[{self.a}, {self.b}], [{self.c}, {self.d}]]{scale})"
