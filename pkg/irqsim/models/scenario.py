"""
Scenario file schema.

A scenario is a JSON document with the sections ``arch``, ``load``,
``measure`` and ``report``. Unknown keys are rejected and every duration
carries a unit suffix; see docs/scenario-schema.md.
"""
import json
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_core import PydanticCustomError

from irqsim.exceptions import BadUnit, BadValue, ParseError, ScenarioError, UnknownKey
from irqsim.models.distributions import (
    MAX_TIME,
    ConstantDist,
    DistributionSpec,
    Duration,
    ShiftedExponentialDist,
    UniformDist,
)

SUBSYSTEMS = ("net-driver", "serial-driver", "kernel-sync", "rt-core")
LINE_NAMES = ("timer", "net", "serial")
GUEST_PRIORITY = 0


def _us(value: int) -> int:
    return value * 1_000


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CostModel(StrictModel):
    """Costs of the interrupt and scheduling paths, in nanoseconds."""
    isr_entry: DistributionSpec = ConstantDist(value=0)
    isr_body: Dict[str, DistributionSpec] = Field(default_factory=lambda: {"timer": ConstantDist(value=0)})
    pending_mgmt: Duration = 0
    soft_toggle: Duration = 0
    hard_mask_sections: Dict[str, DistributionSpec] = Field(default_factory=dict)
    mask_cap: Duration = _us(50)
    sched_decide: Duration = 0
    context_cost: DistributionSpec = ConstantDist(value=0)
    wrapper_overhead: DistributionSpec = ConstantDist(value=0)
    guest_idle_slice: Duration = _us(1000)

    @field_validator("isr_body")
    @classmethod
    def _known_lines(cls, value):
        for name in value:
            if name not in LINE_NAMES:
                raise PydanticCustomError("bad_value", "unknown IRQ line '{name}'", {"name": name})
        return value

    @field_validator("hard_mask_sections")
    @classmethod
    def _known_subsystems(cls, value):
        for name in value:
            if name not in SUBSYSTEMS:
                raise PydanticCustomError("bad_value", "unknown subsystem '{name}'", {"name": name})
        return value

    @field_validator("guest_idle_slice")
    @classmethod
    def _positive_slice(cls, value):
        if value <= 0:
            raise PydanticCustomError("bad_value", "guest_idle_slice must be positive")
        return value

    def entry_bound(self) -> Optional[int]:
        return self.isr_entry.upper_bound()


class ArchConfig(StrictModel):
    variant: Literal["direct", "virtualized"]
    costs: CostModel = Field(default_factory=CostModel)
    timer_hw_priority: int = 10


class NetStorm(StrictModel):
    """Flood-ping load: a stochastic stream of network interrupts."""
    enabled: bool = False
    irq_rate: DistributionSpec = ShiftedExponentialDist(min=_us(20), mean=_us(400))
    isr_body: DistributionSpec = UniformDist(lo=_us(2), hi=_us(4))
    kernel_work: DistributionSpec = ShiftedExponentialDist(min=_us(5), mean=_us(15))
    mask_section: DistributionSpec = ShiftedExponentialDist(min=_us(1), mean=_us(5))
    hw_priority: int = 5
    trigger: Literal["edge", "level"] = "edge"
    task_priority: int = 60

    @field_validator("irq_rate")
    @classmethod
    def _positive_gap(cls, value):
        if value.lower_bound() <= 0:
            raise PydanticCustomError("bad_value", "irq_rate inter-arrival times must be positive")
        return value


class SerialCopier(StrictModel):
    """chargen-to-serial load: a low-priority task feeding the UART."""
    enabled: bool = False
    priority: int = 10
    chunk_work: DistributionSpec = UniformDist(lo=_us(20), hi=_us(40))
    serial_irq: DistributionSpec = UniformDist(lo=_us(3), hi=_us(6))
    mask_section: DistributionSpec = UniformDist(lo=_us(1), hi=_us(5))
    tx_delay: DistributionSpec = ConstantDist(value=_us(1400))
    hw_priority: int = 4
    trigger: Literal["edge", "level"] = "level"

    @field_validator("tx_delay")
    @classmethod
    def _positive_delay(cls, value):
        if value.lower_bound() <= 0:
            raise PydanticCustomError("bad_value", "tx_delay must be positive")
        return value


class LoadSpec(StrictModel):
    net_storm: NetStorm = Field(default_factory=NetStorm)
    serial_copier: SerialCopier = Field(default_factory=SerialCopier)

    @property
    def idle(self) -> bool:
        return not (self.net_storm.enabled or self.serial_copier.enabled)


class MeasureConfig(StrictModel):
    interrupt_count: int = Field(default=100_000, ge=0)
    rate_hz: int = Field(default=4000, ge=0)
    warmup_discard: int = Field(default=16, ge=0)
    seed: int = Field(default=42, ge=0, le=MAX_TIME)
    mt_priority: int = 255
    mt_work: Duration = 0

    def fire_time(self, k: int) -> int:
        """Assert time of the k-th timer interrupt (k >= 1)."""
        return k * 1_000_000_000 // self.rate_hz

    @property
    def period(self) -> int:
        return 1_000_000_000 // self.rate_hz


class ReportConfig(StrictModel):
    bucket_width: Duration = 1_000
    max_buckets: int = Field(default=10_000, gt=0)
    outputs: List[Literal["report", "samples", "histograms", "plot", "trace"]] = Field(
        default_factory=lambda: ["report", "histograms", "plot"]
    )

    @field_validator("bucket_width")
    @classmethod
    def _positive_width(cls, value):
        if value <= 0:
            raise PydanticCustomError("bad_value", "bucket_width must be positive")
        return value


class ScenarioFile(StrictModel):
    name: str
    arch: ArchConfig
    load: LoadSpec = Field(default_factory=LoadSpec)
    measure: MeasureConfig = Field(default_factory=MeasureConfig)
    report: ReportConfig = Field(default_factory=ReportConfig)

    @model_validator(mode="after")
    def _priorities(self):
        problems = priority_problems(self.arch, self.load, self.measure)
        if problems:
            raise PydanticCustomError("bad_value", problems[0])
        return self


def priority_problems(arch: ArchConfig, load: LoadSpec, measure: MeasureConfig) -> List[str]:
    """List violations of the priority ordering the benchmark relies on."""
    problems = []
    net, serial = load.net_storm, load.serial_copier
    for label, priority in (("net_storm.task_priority", net.task_priority), ("serial_copier.priority", serial.priority)):
        if priority >= measure.mt_priority:
            problems.append(f"{label} {priority} must be below the measurement task priority {measure.mt_priority}")
        if priority <= GUEST_PRIORITY:
            problems.append(f"{label} {priority} must be above the guest priority {GUEST_PRIORITY}")
    for label, hw in (("net_storm.hw_priority", net.hw_priority), ("serial_copier.hw_priority", serial.hw_priority)):
        if hw >= arch.timer_hw_priority:
            problems.append(f"{label} {hw} must be below the timer hw_priority {arch.timer_hw_priority}")
    return problems


def _location(loc) -> str:
    return ".".join(str(part) for part in loc) or "<document>"


def translate_validation_error(exc: ValidationError) -> ScenarioError:
    """Map the first pydantic error onto the scenario error hierarchy."""
    error = exc.errors()[0]
    location = _location(error["loc"])
    kind = error["type"]
    if kind == "extra_forbidden":
        return UnknownKey(f"unknown key '{error['loc'][-1]}'", location=location)
    if kind == "bad_unit":
        return BadUnit(error["msg"], location=location)
    if kind == "missing":
        return BadValue("required key is missing", location=location)
    return BadValue(error["msg"], location=location)


def parse_scenario(text: str) -> ScenarioFile:
    """Parse and validate a scenario document.

    Args:
        text: JSON scenario document

    Returns:
        ScenarioFile: Validated configuration

    Raises:
        ParseError: If the text is not a JSON object
        UnknownKey: If a key is not part of the schema
        BadUnit: If a duration lacks its unit suffix
        BadValue: If a value is missing, out of range or of the wrong type
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, location=f"line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(data, dict):
        raise ParseError("scenario document must be a JSON object")
    try:
        return ScenarioFile.model_validate(data, context={"strict_units": True})
    except ValidationError as exc:
        raise translate_validation_error(exc) from exc


def render_scenario(scenario: ScenarioFile) -> str:
    """Serialise a scenario in canonical form; parse_scenario() reads it back."""
    return scenario.model_dump_json(indent=2) + "\n"
