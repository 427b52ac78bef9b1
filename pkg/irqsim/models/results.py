from typing import Dict, NamedTuple, Optional

from pydantic import BaseModel, ConfigDict

from irqsim.models.scenario import ScenarioFile


class LatencySample(NamedTuple):
    """One timer interrupt's measurement, in nanoseconds."""
    n: int
    irq_latency: int
    cs_delay: int
    overrun: bool


class Summary(BaseModel):
    """Aggregate of one latency series; min and max in ns, mean and sigma in µs."""
    model_config = ConfigDict(frozen=True)

    count: int
    min: int
    max: int
    mean: float
    sigma: float
    overrun_count: int = 0


class Histogram(BaseModel):
    """Fixed-width bucket counts; index = floor(sample / bucket_width)."""
    model_config = ConfigDict(frozen=True)

    bucket_width: int
    buckets: Dict[int, int]
    underflow: int = 0
    overflow: int = 0

    @property
    def total(self) -> int:
        return sum(self.buckets.values()) + self.underflow + self.overflow


class RunReport(BaseModel):
    """Per-scenario, per-architecture result of one run.

    ``config`` echoes the scenario with the effective seed and count, so
    feeding it back to the runner reproduces the run bit for bit.
    """
    scenario: str
    arch: str
    idle: bool
    seed: int
    interrupt_count: int
    warmup_discarded: int
    irq_latency: Summary
    cs_delay: Summary
    irq_histogram: Histogram
    cs_histogram: Histogram
    hard_limit_ns: Optional[int] = None
    hard_limit_ok: Optional[bool] = None
    counters: Dict[str, int]
    config: ScenarioFile
