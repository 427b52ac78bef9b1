"""
Latency aggregation: streaming summaries, histograms and run reports.
"""
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional

import numpy as np

from irqsim.exceptions import BadWidth, EmptyInput
from irqsim.models.results import Histogram, LatencySample, RunReport, Summary


@dataclass
class StreamingSummary:
    """Single-pass count, extrema, mean and variance of integer samples.

    Samples are whole nanoseconds, so the first and second moments are kept
    as exact integer sums; the mean and M2 derived from them do not depend on
    the order the samples arrived in.
    """
    count: int = 0
    total: int = 0
    total_sq: int = 0
    min_val: Optional[int] = None
    max_val: Optional[int] = None

    def update(self, value: int) -> None:
        self.count += 1
        self.total += value
        self.total_sq += value * value
        if self.min_val is None or value < self.min_val:
            self.min_val = value
        if self.max_val is None or value > self.max_val:
            self.max_val = value

    @property
    def mean(self) -> float:
        return self.total / self.count if self.count else 0.0

    @property
    def m2(self) -> float:
        """Sum of squared deviations from the mean."""
        if not self.count:
            return 0.0
        return (self.count * self.total_sq - self.total * self.total) / self.count

    @property
    def sigma(self) -> float:
        """Population standard deviation."""
        if not self.count:
            return 0.0
        return math.sqrt((self.count * self.total_sq - self.total * self.total) / (self.count * self.count))

    def result(self, overrun_count: int = 0) -> Summary:
        if not self.count:
            raise EmptyInput()
        return Summary(
            count=self.count,
            min=self.min_val,
            max=self.max_val,
            mean=self.mean / 1_000,
            sigma=self.sigma / 1_000,
            overrun_count=overrun_count,
        )


def summarize(samples: Iterable[int], overrun_count: int = 0) -> Summary:
    """Summarize a latency series given in nanoseconds.

    Args:
        samples: Latencies in ns
        overrun_count: Samples excluded upstream for overrun, carried through

    Returns:
        Summary: max in ns, mean and population sigma in µs

    Raises:
        EmptyInput: If there are no samples
    """
    acc = StreamingSummary()
    for value in samples:
        acc.update(value)
    return acc.result(overrun_count)


def histogram(samples: Iterable[int], bucket_width: int, max_buckets: Optional[int] = None) -> Histogram:
    """Count samples into buckets of ``bucket_width`` ns.

    Bucket ``i`` holds samples in ``[i * width, (i + 1) * width)``. Indices at
    or beyond ``max_buckets`` are counted as overflow.

    Raises:
        BadWidth: If ``bucket_width`` is not positive
    """
    if bucket_width <= 0:
        raise BadWidth(f"bucket width {bucket_width} is not positive")
    values = np.fromiter(samples, dtype=np.int64)
    underflow = int(np.count_nonzero(values < 0))
    index = values[values >= 0] // bucket_width
    overflow = 0
    if max_buckets is not None:
        overflow = int(np.count_nonzero(index >= max_buckets))
        index = index[index < max_buckets]
    keys, counts = np.unique(index, return_counts=True)
    buckets = {int(k): int(c) for k, c in zip(keys, counts)}
    return Histogram(bucket_width=bucket_width, buckets=buckets, underflow=underflow, overflow=overflow)


def hard_limit(scenario) -> Optional[int]:
    """Worst interrupt latency the cost model allows: longest mask plus longest entry."""
    entry = scenario.arch.costs.entry_bound()
    if entry is None:
        return None
    return scenario.arch.costs.mask_cap + entry


def build_report(scenario, samples: List[LatencySample], counters=None) -> RunReport:
    """Aggregate one run's samples into a report.

    The first ``warmup_discard`` samples and every overrun sample are left
    out of the summaries and histograms; overruns are still counted.

    Args:
        scenario: ScenarioFile the run was made from
        samples: All samples of the run, in order
        counters: Event counters to carry into the report

    Returns:
        RunReport: Summaries, histograms and the hard-limit check
    """
    measure, report = scenario.measure, scenario.report
    kept = samples[measure.warmup_discard:]
    clean = [s for s in kept if not s.overrun]
    overruns = len(kept) - len(clean)
    if not clean:
        raise EmptyInput(f"{scenario.name}: every sample after warm-up overran")

    irq = summarize((s.irq_latency for s in clean), overruns)
    cs = summarize((s.cs_delay for s in clean), overruns)
    limit = hard_limit(scenario)
    return RunReport(
        scenario=scenario.name,
        arch=scenario.arch.variant,
        idle=scenario.load.idle,
        seed=measure.seed,
        interrupt_count=measure.interrupt_count,
        warmup_discarded=min(measure.warmup_discard, len(samples)),
        irq_latency=irq,
        cs_delay=cs,
        irq_histogram=histogram((s.irq_latency for s in clean), report.bucket_width, report.max_buckets),
        cs_histogram=histogram((s.cs_delay for s in clean), report.bucket_width, report.max_buckets),
        hard_limit_ns=limit,
        hard_limit_ok=None if limit is None else irq.max <= limit,
        counters=dict(counters or {}),
        config=scenario,
    )
