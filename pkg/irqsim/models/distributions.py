"""
Durations and cost distributions.

All simulator time is integer nanoseconds. Scenario files spell durations as
strings with a unit suffix; parsed models hold plain integers.
"""
import re
from decimal import Decimal, InvalidOperation
from typing import Annotated, Literal, Optional, Union

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    ValidationError,
    ValidationInfo,
    model_validator,
)
from pydantic_core import PydanticCustomError

from irqsim.exceptions import BadDistribution

MAX_TIME = 2**64 - 1

UNITS = {"ns": 1, "us": 1_000, "µs": 1_000, "ms": 1_000_000, "s": 1_000_000_000}

_DURATION_RE = re.compile(r"^\s*(-?\d+(?:\.\d+)?)\s*(ns|us|µs|ms|s)\s*$")


def parse_duration(value, info: ValidationInfo = None) -> int:
    """Convert a duration literal to integer nanoseconds.

    Strings must carry a unit suffix. Integers are accepted as nanoseconds
    unless the validation context asks for strict units (scenario files).

    Args:
        value: Raw value from JSON or Python
        info: Pydantic validation info, carries the ``strict_units`` flag

    Returns:
        int: Duration in nanoseconds
    """
    strict = bool(info is not None and info.context and info.context.get("strict_units"))
    if isinstance(value, bool):
        raise PydanticCustomError("bad_value", "expected a duration, got a boolean")
    if isinstance(value, int):
        if strict:
            raise PydanticCustomError(
                "bad_unit", "duration {value} needs a unit suffix (ns, us, ms, s)", {"value": value}
            )
        return value
    if isinstance(value, float):
        raise PydanticCustomError(
            "bad_unit", "duration {value} needs a unit suffix (ns, us, ms, s)", {"value": value}
        )
    if not isinstance(value, str):
        raise PydanticCustomError("bad_value", "expected a duration string")

    match = _DURATION_RE.match(value)
    if not match:
        raise PydanticCustomError(
            "bad_unit", "duration '{value}' needs a unit suffix (ns, us, ms, s)", {"value": value}
        )
    try:
        magnitude = Decimal(match.group(1)) * UNITS[match.group(2)]
    except InvalidOperation:
        raise PydanticCustomError("bad_value", "unreadable duration '{value}'", {"value": value})
    if magnitude < 0:
        raise PydanticCustomError("bad_value", "duration '{value}' must not be negative", {"value": value})
    if magnitude != magnitude.to_integral_value():
        raise PydanticCustomError(
            "bad_value", "duration '{value}' is not a whole number of nanoseconds", {"value": value}
        )
    return int(magnitude)


def format_duration(value: int) -> str:
    """Render nanoseconds in the canonical scenario-file form."""
    return f"{value}ns"


Duration = Annotated[
    int,
    BeforeValidator(parse_duration),
    Field(ge=0, le=MAX_TIME),
    PlainSerializer(format_duration, return_type=str, when_used="json"),
]


class ConstantDist(BaseModel):
    """A fixed cost."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["constant"] = "constant"
    value: Duration

    def check(self) -> None:
        if self.value < 0:
            raise BadDistribution(f"constant({self.value}) is negative")

    def lower_bound(self) -> int:
        return self.value

    def upper_bound(self) -> Optional[int]:
        return self.value

    def expected_value(self) -> float:
        return float(self.value)


class UniformDist(BaseModel):
    """Integer nanoseconds drawn uniformly from the closed range [lo, hi]."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["uniform"] = "uniform"
    lo: Duration
    hi: Duration

    @model_validator(mode="after")
    def _ordered(self):
        if self.lo > self.hi:
            raise PydanticCustomError(
                "bad_distribution", "uniform needs lo <= hi (got {lo} > {hi})", {"lo": self.lo, "hi": self.hi}
            )
        return self

    def check(self) -> None:
        if self.lo < 0 or self.lo > self.hi:
            raise BadDistribution(f"uniform({self.lo}, {self.hi}) needs 0 <= lo <= hi")

    def lower_bound(self) -> int:
        return self.lo

    def upper_bound(self) -> Optional[int]:
        return self.hi

    def expected_value(self) -> float:
        return (self.lo + self.hi) / 2.0


class ShiftedExponentialDist(BaseModel):
    """``min`` plus an exponential tail whose overall mean is ``mean``."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["shifted_exponential"] = "shifted_exponential"
    min: Duration
    mean: Duration

    @model_validator(mode="after")
    def _tail(self):
        if self.mean <= self.min:
            raise PydanticCustomError(
                "bad_distribution",
                "shifted_exponential needs mean > min (got mean={mean}, min={min})",
                {"mean": self.mean, "min": self.min},
            )
        return self

    def check(self) -> None:
        if self.min < 0 or self.mean <= self.min:
            raise BadDistribution(f"shifted_exponential(min={self.min}, mean={self.mean}) needs mean > min >= 0")

    def lower_bound(self) -> int:
        return self.min

    def upper_bound(self) -> Optional[int]:
        return None

    def expected_value(self) -> float:
        return float(self.mean)


DistributionSpec = Annotated[
    Union[ConstantDist, UniformDist, ShiftedExponentialDist],
    Field(discriminator="kind"),
]


def _build(model, **params):
    try:
        return model(**params)
    except ValidationError as exc:
        raise BadDistribution(exc.errors()[0]["msg"]) from exc


def constant(value) -> ConstantDist:
    """Build a constant distribution, raising BadDistribution on bad input."""
    return _build(ConstantDist, value=value)


def uniform(lo, hi) -> UniformDist:
    """Build a uniform distribution, raising BadDistribution on bad input."""
    return _build(UniformDist, lo=lo, hi=hi)


def shifted_exponential(min, mean) -> ShiftedExponentialDist:
    """Build a shifted-exponential distribution, raising BadDistribution on bad input."""
    return _build(ShiftedExponentialDist, min=min, mean=mean)


ZERO = ConstantDist(value=0)
