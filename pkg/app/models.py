import math
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from app.config import (
    DEFAULT_ALPHA,
    DEFAULT_C,
    DEFAULT_CLASSIFY_DEPTH,
    DEFAULT_CONTROL_DEPTH,
    DEFAULT_EPSILON,
    DEFAULT_PERIOD_CAP,
    DEFAULT_SWEEP_PERIOD,
    MAX_CONTROL_DEPTH,
    MAX_PRECISION,
    get_default_precision,
)
from app.core.alpha import PRESETS, parse_alpha

# Run configuration
class RunConfig(BaseModel):
    alpha: str = DEFAULT_ALPHA
    precision: int = Field(default_factory=get_default_precision)
    epsilon: float = DEFAULT_EPSILON
    c: Optional[float] = None
    gamma: Optional[float] = None
    family: Literal["pure", "stress"] = "stress"
    modulated: bool = True
    depth: int = DEFAULT_CONTROL_DEPTH
    classify_depth: int = DEFAULT_CLASSIFY_DEPTH
    period_max: int = DEFAULT_SWEEP_PERIOD
    period_cap: int = DEFAULT_PERIOD_CAP
    iters: Optional[int] = None
    samples: Optional[int] = None
    seed: int = 0
    workers: int = 1
    out: Optional[str] = None
    format: Literal["csv", "json"] = "csv"

    @field_validator("alpha")
    @classmethod
    def alpha_parses(cls, value: str) -> str:
        parse_alpha(value)
        return value

    @field_validator("precision")
    @classmethod
    def precision_in_range(cls, value: int) -> int:
        if not 32 <= value <= MAX_PRECISION:
            raise ValueError(f"precision must lie in [32, {MAX_PRECISION}] bits")
        return value

    @field_validator("depth")
    @classmethod
    def depth_in_range(cls, value: int) -> int:
        if not 1 <= value <= MAX_CONTROL_DEPTH:
            raise ValueError(f"control depth must lie in [1, {MAX_CONTROL_DEPTH}]")
        return value

    @field_validator("workers")
    @classmethod
    def workers_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("workers must be at least 1")
        return value

    @model_validator(mode="after")
    def parameters_consistent(self) -> "RunConfig":
        if self.c is not None and self.gamma is not None:
            raise ValueError("--c and --gamma are mutually exclusive")
        if self.gamma is not None and not self.gamma > 1:
            raise ValueError("gamma must exceed 1")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.exponent > self.epsilon:
            raise ValueError(f"need c > epsilon, got c={self.exponent} and epsilon={self.epsilon}")
        if self.period_max > self.period_cap:
            raise ValueError(f"period-max {self.period_max} exceeds the cap {self.period_cap}")
        return self

    @property
    def exponent(self) -> float:
        """c, derived from gamma when gamma was given"""
        if self.gamma is not None:
            return math.log((self.gamma + 1 / self.gamma) / 2)
        return DEFAULT_C if self.c is None else self.c

    @property
    def alpha_spec(self):
        return parse_alpha(self.alpha)

    def echo(self) -> Dict[str, Any]:
        """Config fields for output metadata (output path left out)"""
        data = self.model_dump(exclude={"out"})
        data["c"] = self.exponent
        if self.alpha in PRESETS:
            data["alpha_spec"] = PRESETS[self.alpha]
        return data

# Sweep Models
class SweepRecord(BaseModel):
    orbit_id: str
    period: int
    mu_I0_num: int
    mu_I0_den: int
    lambda1: float
    bound: float
    margin: float
    chain_ok: Optional[bool] = None
    weak_proxy: Optional[float] = None

    @property
    def mu(self) -> Fraction:
        return Fraction(self.mu_I0_num, self.mu_I0_den)

    @classmethod
    def from_values(cls, orbit_id: str, period: int, mu: Fraction, lambda1: float, bound: float,
                    **extra: Any) -> "SweepRecord":
        return cls(
            orbit_id=orbit_id,
            period=period,
            mu_I0_num=mu.numerator,
            mu_I0_den=mu.denominator,
            lambda1=lambda1,
            bound=bound,
            margin=bound - lambda1,
            **extra,
        )

class SweepSummary(BaseModel):
    records: List[SweepRecord]
    skipped: List[str] = []
    worst_margin: float
