"""
Laboratory Errors
Exception hierarchy shared by the numerical modules and the command layer
"""

from typing import Any, Dict, Optional


class LabError(Exception):
    """Base class for every error raised by the laboratory"""


class UndecidableComparison(LabError, ArithmeticError):
    """Two enclosures overlap, so their order cannot be decided at this precision"""


class UndecidableFloor(LabError, ArithmeticError):
    """x + j*alpha lies within the carried radius of an integer"""

    def __init__(self, index: int, message: Optional[str] = None):
        self.index = index
        super().__init__(message or f"floor undecidable at series index {index}")


class PrecisionExhausted(LabError):
    """Precision escalation reached the configured cap without a decision"""


class OnBoundary(LabError):
    """Point lies on (or within radius of) the boundary of a gap"""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"point on the boundary of gap {index}")


class EvaluationUndecidable(LabError):
    """Assembled cocycle could not be evaluated at a point"""


class DepthExceeded(LabError):
    """Argument lies below the last tabulated control point"""

    def __init__(self, value: float, limit: float):
        self.value = value
        self.limit = limit
        super().__init__(f"t={value!r} is below the last control point {limit!r}; extend the table")


class NotPeriodic(LabError):
    """Supplied orbit is not a cycle of the base map"""


class CapExceeded(LabError):
    """Requested size exceeds a configured cap"""


class AlphaError(LabError, ValueError):
    """Malformed or unsupported rotation-number specification"""


# Statement each check verifies; failure records carry it as their reference
CHECK_REFERENCES: Dict[str, str] = {
    "invalid-config": "c > epsilon > 0 with alpha irrational",
    "numerical-error": "every enclosure decided within the precision cap",
    "herman-exponent": "lambda_1(R_alpha, B_0, Leb) = log((gamma + 1/gamma)/2) = c",
    "herman-identity": "B_0^(2n)(R_alpha^-n(base)) = (-1)^n U(-n alpha), base 3/4 by default",
    "family-product-bound": "||B_t^(n)(y)|| <= e^M(t) for every t > 0, n and y",
    "family-attainment": "sup_n ||B_t^(n)|| reaches e^M(t) (stress family)",
    "two-symbol-exponent": "two-symbol cocycle: lambda_1 = 0 on (0^(k-1)1), log 2 at the fixed point",
    "gap-traversal-bound": "log ||A^(n+1)(x)|| <= epsilon sqrt((n+m+2)/2) for x in I_n with D^(n+1)x in I_m",
    "isolation-bound": "lambda_1(mu) <= epsilon sqrt(mu(I_0)) for every periodic measure mu",
    "hitting-chain-bound": "log ||A^(k)(x)|| <= sum of epsilon sqrt(a_i) over the I_0 excursions",
    "sturmian-exponent": "lambda_1(D, A, nu) = c",
    "rotation-reduction": "A^(n)(x) = B_0^(n)(h(x)) along D-orbits in K",
    "approximant-bound": "q-periodic mechanical orbits have mu(I_0) <= 2/q and lambda_1 <= epsilon sqrt(2/q)",
}


class CheckFailed(LabError):
    """An acceptance check found a violation; carries a machine-readable record"""

    def __init__(self, check: str, message: str, details: Optional[Dict[str, Any]] = None):
        if check not in CHECK_REFERENCES:
            raise KeyError(f"unregistered check {check!r}")
        self.check = check
        self.details = details or {}
        super().__init__(message)

    @property
    def reference(self) -> str:
        return CHECK_REFERENCES[self.check]

    def to_record(self) -> Dict[str, Any]:
        return {
            "status": "failed",
            "check": self.check,
            "reference": self.reference,
            "message": str(self),
            "details": self.details,
        }
