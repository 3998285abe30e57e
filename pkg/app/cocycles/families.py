"""
Cocycle Families
Herman's cocycle, the product-bounded families B_t and the assembled cocycle A(x) = B_psi(x)(h(x))
"""

import math
import sys
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from app.config import (
    ATTAINMENT_TOLERANCE,
    BOUND_TOLERANCE,
    IDENTITY_RADIUS,
    MAX_CONTROL_DEPTH,
    MAX_PRECISION,
    get_default_precision,
)
from app.cocycles.engine import BaseMap, CocycleSpec, Mode, product
from app.cocycles.matrices import Mat2
from app.core.alpha import AlphaSpec
from app.core.ball import BallReal
from app.core.circle import CirclePoint, rotate
from app.core.errors import CapExceeded, DepthExceeded, EvaluationUndecidable, PrecisionExhausted
from app.sturmian.gaps import GapClassification, Verdict, classify
from app.sturmian.modulation import ModulationContext, ell, phi_of_classification
from app.sturmian.staircase import factor_map_h

KNOWN_LIMITATIONS = {
    "c0-continuity": (
        "Both shipped families are discontinuous at t = 0, so the assembled cocycle A is not "
        "claimed to be continuous. The exponent statements are reproduced numerically; "
        "continuity of A (and any Hoelder regularity) is out of scope."
    ),
}

Angle = Union[float, CirclePoint]


class FamilyKind(str, Enum):
    PURE = "pure"
    STRESS = "stress"


class HermanParams(BaseModel):
    """diag(gamma, 1/gamma) U(x) over R_alpha, with exponent c = log((gamma + 1/gamma)/2)"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    gamma: float
    alpha: AlphaSpec

    @field_validator("gamma")
    @classmethod
    def gamma_above_one(cls, value: float) -> float:
        if not value > 1:
            raise ValueError(f"gamma must exceed 1, got {value}")
        return value

    @property
    def c(self) -> float:
        return math.log((self.gamma + 1 / self.gamma) / 2)

    @classmethod
    def from_c(cls, c: float, alpha: AlphaSpec) -> "HermanParams":
        """Inverse map gamma = e^c + sqrt(e^(2c) - 1)"""
        if not c > 0:
            raise ValueError(f"c must be positive, got {c}")
        return cls(gamma=math.exp(c) + math.sqrt(math.expm1(2 * c)), alpha=alpha)

    @classmethod
    def from_gamma(cls, gamma: float, alpha: AlphaSpec) -> "HermanParams":
        return cls(gamma=gamma, alpha=alpha)

    def gamma_ball(self, prec: int = None) -> BallReal:
        return BallReal.exact(self.gamma, prec)


# -- matrix builders ------------------------------------------------------------

def _cos_sin(y: Angle, mode: Mode, prec: int):
    if mode is Mode.BALL:
        ball = y.ball(prec) if isinstance(y, CirclePoint) else BallReal.exact(y, prec)
        return ball.cos_2pi(), ball.sin_2pi()
    angle = 2 * math.pi * float(y)
    return math.cos(angle), math.sin(angle)


def rotation_matrix(y: Angle, mode: Mode = Mode.DOUBLE, prec: int = None) -> Mat2:
    """U(y) = [[cos 2 pi y, -sin 2 pi y], [sin 2 pi y, cos 2 pi y]]"""
    c, s = _cos_sin(y, mode, prec or get_default_precision())
    return Mat2(c, -s, s, c)


def herman_matrix(params: HermanParams, y: Angle, mode: Mode = Mode.DOUBLE, prec: int = None) -> Mat2:
    prec = prec or get_default_precision()
    c, s = _cos_sin(y, mode, prec)
    if mode is Mode.BALL:
        gamma = params.gamma_ball(prec)
        inverse = gamma.reciprocal()
    else:
        gamma, inverse = params.gamma, 1 / params.gamma
    return Mat2(gamma * c, -(gamma * s), inverse * s, inverse * c)


def _herman_batch(params: HermanParams):
    def batch(angles: np.ndarray) -> np.ndarray:
        c, s = np.cos(2 * np.pi * angles), np.sin(2 * np.pi * angles)
        out = np.empty((len(angles), 2, 2))
        out[:, 0, 0] = params.gamma * c
        out[:, 0, 1] = -params.gamma * s
        out[:, 1, 0] = s / params.gamma
        out[:, 1, 1] = c / params.gamma
        return out
    return batch


def herman(params: HermanParams) -> CocycleSpec:
    """Herman's cocycle over the rotation R_alpha; det = 1 everywhere"""
    return CocycleSpec(
        name=f"herman(gamma={params.gamma:.12g})",
        generator=lambda x, mode, prec: herman_matrix(params, x, mode, prec),
        base=BaseMap.ROTATION,
        alpha=params.alpha,
        batch=_herman_batch(params),
    )


def constant_spec(matrix: Mat2, alpha: AlphaSpec, name: str = "constant") -> CocycleSpec:
    """Cocycle with a constant double-mode value over R_alpha"""
    array = matrix.to_array()
    return CocycleSpec(
        name=name,
        generator=lambda x, mode, prec: Mat2(matrix.a, matrix.b, matrix.c, matrix.d),
        base=BaseMap.ROTATION,
        alpha=alpha,
        batch=lambda angles: np.broadcast_to(array, (len(angles), 2, 2)).copy(),
    )


def two_symbol_matrix(x: CirclePoint, mode: Mode = Mode.DOUBLE, prec: int = None) -> Mat2:
    """diag(2, 1/2) on the first half of the circle (first binary digit 0), the quarter turn on the second"""
    first_half = x.value < Fraction(1, 2) if x.is_exact else float(x) < 0.5
    if first_half:
        return Mat2(2.0, 0.0, 0.0, 0.5)
    return Mat2(0.0, -1.0, 1.0, 0.0)


def two_symbol_cocycle() -> CocycleSpec:
    """Locally constant cocycle over D; on a cycle its exponent depends only on the binary word of the orbit"""
    return CocycleSpec(name="two-symbol", generator=two_symbol_matrix, base=BaseMap.DOUBLING)


# -- B_t families ---------------------------------------------------------------

class BFamily:
    """
    Parametrised family B_t(y) with ||B_t^(n)(y)|| <= e^(M(t)) over R_alpha for t > 0.

    B_0 is Herman's matrix for both kinds. The pure kind is U(y); the stress
    kind is C_t U(y) C_t^-1 with C_t = diag(e^(M/2), e^(-M/2)), so products
    along a rotation orbit are C_t U(sum) C_t^-1 and reach norm e^M when the
    accumulated angle passes 1/4.
    """

    def __init__(self, kind: FamilyKind, herman: HermanParams, modulation: ModulationContext):
        self.kind = FamilyKind(kind)
        self.herman = herman
        self.modulation = modulation

    @property
    def alpha(self) -> AlphaSpec:
        return self.herman.alpha

    def with_modulation(self, modulation: ModulationContext) -> "BFamily":
        return BFamily(self.kind, self.herman, modulation)

    def bound(self, t: float) -> float:
        """log of the declared product bound e^(M(t)) for t > 0"""
        return self.modulation.M(t)

    def matrix(self, t: Union[float, BallReal], y: Angle, mode: Mode = Mode.DOUBLE, prec: int = None) -> Mat2:
        prec = prec or get_default_precision()
        if (isinstance(t, BallReal) and t.is_exact and not t.mid) or (not isinstance(t, BallReal) and t == 0):
            return herman_matrix(self.herman, y, mode, prec)
        if self.kind is FamilyKind.PURE:
            return rotation_matrix(y, mode, prec)
        c, s = _cos_sin(y, mode, prec)
        if mode is Mode.BALL:
            stretch = self.modulation.M(t if isinstance(t, BallReal) else BallReal.exact(t, prec)).exp()
            return Mat2(c, -(stretch * s), s / stretch, c)
        stretch = math.exp(self.modulation.M(min(float(t), 1.0)))
        return Mat2(c, -stretch * s, s / stretch, c)

    def batch(self, t: float, angles: np.ndarray) -> np.ndarray:
        """B_t on an array of float angles"""
        if t == 0:
            return _herman_batch(self.herman)(angles)
        c, s = np.cos(2 * np.pi * angles), np.sin(2 * np.pi * angles)
        stretch = 1.0 if self.kind is FamilyKind.PURE else math.exp(self.modulation.M(t))
        out = np.empty((len(angles), 2, 2))
        out[:, 0, 0] = c
        out[:, 0, 1] = -stretch * s
        out[:, 1, 0] = s / stretch
        out[:, 1, 1] = c
        return out

    def rotation_spec(self, t: float) -> CocycleSpec:
        """B_t as a cocycle over R_alpha for a frozen parameter"""
        return CocycleSpec(
            name=f"{self.kind.value}(t={t:.6g})",
            generator=lambda x, mode, prec: self.matrix(t, x, mode, prec),
            base=BaseMap.ROTATION,
            alpha=self.alpha,
            batch=lambda angles: self.batch(t, angles),
        )


def make_family(kind: Union[str, FamilyKind], herman: HermanParams, modulation: ModulationContext) -> BFamily:
    return BFamily(FamilyKind(kind), herman, modulation)


def _batch_log_norms(mats: np.ndarray) -> np.ndarray:
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    return np.log(0.5 * (np.hypot(a + d, b - c) + np.hypot(a - d, b + c)))


def audit_family(family: BFamily, t_values: Sequence[float], y_values: Sequence[float], iters: int,
                 tolerance: float = BOUND_TOLERANCE,
                 attainment_tolerance: float = ATTAINMENT_TOLERANCE) -> Dict[str, object]:
    """
    Check the product bound log ||B_t^(n)(y)|| <= M(t) + tolerance for n <= iters

    Products for every (t, y) pair advance together as one (P, 2, 2) array.
    Each t records how close max_n log ||B_t^(n)|| comes to M(t); for the
    stress kind that gap must stay within attainment_tolerance.

    Returns:
        Dict with the number of checks, violations, worst excess, per-t peak
        log-norms against M(t) and determinant drift
    """
    pairs = [(float(t), float(y)) for t in t_values for y in y_values if t > 0]
    if not pairs:
        raise ValueError("audit needs at least one t > 0")
    ts = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    bounds = np.array([family.bound(t) for t in ts])
    stretch = np.ones_like(ts) if family.kind is FamilyKind.PURE else np.exp(bounds)
    alpha = family.alpha.float_value

    acc = np.broadcast_to(np.eye(2), (len(pairs), 2, 2)).copy()
    peak = np.full(len(pairs), -np.inf)
    worst_excess = -np.inf
    violations = 0
    det_drift = 0.0
    for n in range(iters):
        angles = 2 * np.pi * np.mod(ys + n * alpha, 1.0)
        c, s = np.cos(angles), np.sin(angles)
        step = np.empty_like(acc)
        step[:, 0, 0] = c
        step[:, 0, 1] = -stretch * s
        step[:, 1, 0] = s / stretch
        step[:, 1, 1] = c
        acc = step @ acc
        logs = _batch_log_norms(acc)
        excess = logs - bounds
        violations += int(np.count_nonzero(excess > tolerance))
        worst_excess = max(worst_excess, float(excess.max()))
        peak = np.maximum(peak, logs)
        det_drift = max(det_drift, float(np.abs(np.linalg.det(acc) - 1).max()))

    per_t: List[Dict[str, float]] = []
    for t in sorted(set(ts.tolist()), reverse=True):
        mask = ts == t
        top = float(peak[mask].max())
        per_t.append({"t": t, "M": family.bound(t), "max_log_norm": top, "gap": family.bound(t) - top})
    attained = family.kind is not FamilyKind.STRESS or all(entry["gap"] <= attainment_tolerance for entry in per_t)
    return {
        "kind": family.kind.value,
        "checks": len(pairs) * iters,
        "violations": violations,
        "worst_excess": worst_excess,
        "det_drift": det_drift,
        "per_t": per_t,
        "attained": attained,
        "passed": violations == 0 and attained,
    }


# -- assembled cocycle ---------------------------------------------------------

class AssembledCocycle:
    """
    A(x) = B_psi(x)(h(x)) over the doubling map.

    On a gap I_n the factor map is the constant pi(-n alpha); on K (psi = 0)
    the value is Herman's matrix at h(x). With modulated=False the
    precursor B_phi(x)(h(x)) is built instead.
    """

    def __init__(self, family: BFamily, modulated: bool = True, extend_table: bool = True):
        self.family = family
        self.modulated = modulated
        self.extend_table = extend_table
        self._gap_images: Dict[Tuple[int, int], CirclePoint] = {}

    @property
    def modulation(self) -> ModulationContext:
        return self.family.modulation

    @property
    def atlas(self):
        return self.modulation.atlas

    @property
    def alpha(self) -> AlphaSpec:
        return self.family.alpha

    def gap_image(self, n: int, prec: int = None) -> CirclePoint:
        """h on I_n: pi(-n alpha)"""
        prec = prec or self.atlas.precision
        key = (n, prec)
        if key not in self._gap_images:
            self._gap_images[key] = rotate(CirclePoint(Fraction(0)), self.alpha, steps=-n, prec=prec)
        return self._gap_images[key]

    def parameter(self, result: GapClassification) -> BallReal:
        """psi (or phi for the precursor) from a classification"""
        value = phi_of_classification(result)
        if not self.modulated or result.verdict is not Verdict.IN_GAP:
            return value
        return value / ell(result.index, self.modulation.root)

    def locate(self, x: CirclePoint) -> Tuple[BallReal, CirclePoint, GapClassification]:
        """
        (t, h(x), classification) for a point of the circle

        Tagged points lie in K by construction, so their classification is
        known without scanning; h then reads the tag.
        """
        if x.is_tagged:
            result = GapClassification.in_k(self.modulation.classify_depth)
        else:
            result = classify(x, self.atlas, self.modulation.classify_depth)
        if result.verdict is Verdict.ON_BOUNDARY:
            raise EvaluationUndecidable(f"point {x!r} is on the boundary of gap {result.index}")
        if result.verdict is Verdict.IN_GAP:
            return self.parameter(result), self.gap_image(result.index), result
        return self.parameter(result), factor_map_h(x, self.atlas.staircase), result

    def _extend_table(self, error: DepthExceeded):
        depth = self.modulation.depth * 2
        if not self.extend_table or depth > MAX_CONTROL_DEPTH:
            raise EvaluationUndecidable(f"control table exhausted at t={error.value!r}") from error
        print(f"[Assembled] WARNING: t={error.value:.3e} below table, extending control depth to {depth}", file=sys.stderr)
        try:
            extended = self.modulation.extended(depth)
        except (CapExceeded, PrecisionExhausted) as e:
            raise EvaluationUndecidable(f"control table cannot reach t={error.value!r}: {e}") from e
        self.family = self.family.with_modulation(extended)

    def control_value(self, t: float) -> float:
        """M(t), extending the control table as far as needed"""
        while True:
            try:
                return self.modulation.M(t)
            except DepthExceeded as e:
                self._extend_table(e)

    def evaluate(self, x: CirclePoint, mode: Mode = Mode.DOUBLE, prec: int = None) -> Mat2:
        prec = prec or self.atlas.precision
        t, image, _ = self.locate(x)
        if x.is_tagged and mode is Mode.DOUBLE:
            image = x.tag.preimage_float()
        t_value = t if mode is Mode.BALL else float(t)
        while True:
            try:
                return self.family.matrix(t_value, image, mode, prec)
            except DepthExceeded as e:
                self._extend_table(e)

    def check_untagged(self, x: CirclePoint, slack: float = 1e-12) -> Dict[str, object]:
        """
        Evaluate a tagged point of K again with its tag dropped

        The ball representative goes through classify, psi and the staircase
        inversion for h; the resulting ball matrix must enclose the tagged
        value. h on untagged points of K is only resolved to about
        1/log2(1/radius), so the enclosure is wide but sound.

        Returns:
            Dict with verdict, holds (None when the ball point sits on a gap
            boundary at this precision) and the widest entry radius
        """
        if not x.is_tagged:
            raise ValueError("check_untagged needs a tagged point")
        prec = self.atlas.precision
        expected = self.evaluate(x).to_array()
        point = CirclePoint(x.ball(prec))
        try:
            t, _, result = self.locate(point)
        except EvaluationUndecidable:
            return {"verdict": Verdict.ON_BOUNDARY.value, "holds": None, "radius": math.inf}
        if result.verdict is not Verdict.IN_K or t.definitely_greater(0):
            return {"verdict": result.verdict.value, "holds": False, "radius": math.inf}
        matrix = self.evaluate(point, Mode.BALL, prec)
        entries = (matrix.a, matrix.b, matrix.c, matrix.d)
        holds = all(
            entry.lower - slack <= value <= entry.upper + slack
            for entry, value in zip(entries, expected.ravel().tolist())
        )
        return {"verdict": result.verdict.value, "holds": holds, "radius": max(float(entry.rad) for entry in entries)}

    @property
    def spec(self) -> CocycleSpec:
        label = "assembled" if self.modulated else "precursor"
        return CocycleSpec(
            name=f"{label}[{self.family.kind.value}]",
            generator=lambda x, mode, prec: self.evaluate(x, mode, prec),
            base=BaseMap.DOUBLING,
            alpha=self.alpha,
        )

    def rotation_side(self) -> CocycleSpec:
        """Herman's cocycle: A along D-orbits in K equals B_0 along R-orbits of h"""
        return herman(self.family.herman)


def assemble(family: BFamily, modulated: bool = True) -> AssembledCocycle:
    return AssembledCocycle(family, modulated)


def herman_identity_check(params: HermanParams, n: int, base: Fraction = Fraction(3, 4), precision: int = None,
                          target: float = IDENTITY_RADIUS, cap: int = MAX_PRECISION) -> Dict[str, object]:
    """
    Ball-mode check of A^(2n)(R^-n(base)) = (-1)^n U(-n alpha) for Herman's cocycle

    The product of 2n balls inflates with n, so precision is doubled until
    the residual radius meets target or cap is reached.

    Returns:
        Dict with holds (enclosure contains zero), residual radius, the norm
        of the product and the precision used
    """
    spec = herman(params)
    prec = precision or get_default_precision()
    while True:
        start = rotate(CirclePoint(Fraction(base)), params.alpha, steps=-n, prec=prec)
        lhs = product(spec, start, 2 * n, Mode.BALL, prec)
        rhs = rotation_matrix(rotate(CirclePoint(Fraction(0)), params.alpha, steps=-n, prec=prec), Mode.BALL, prec)
        if n % 2:
            rhs = -rhs
        residual = lhs - rhs
        entries = (residual.a, residual.b, residual.c, residual.d)
        holds = all(entry.contains(0) for entry in entries)
        radius = max(float(abs(entry).upper) for entry in entries)
        if not holds or radius <= target or prec * 2 > cap:
            return {
                "n": n,
                "base": str(Fraction(base)),
                "holds": holds,
                "radius": radius,
                "product_norm": float(lhs.norm()),
                "precision": prec,
            }
        prec *= 2
