"""
Rendering of reports, samples and histograms to text and CSV.
"""
import csv
import io
from typing import Iterable, List, Sequence

from irqsim.exceptions import EmptyInput
from irqsim.models.results import Histogram, LatencySample, RunReport, Summary

SAMPLES_HEADER = ("n", "irq_latency_ns", "cs_delay_ns", "overrun")
HISTOGRAM_HEADER = ("bucket", "start_ns", "end_ns", "count")
TRACE_HEADER = ("time_ns", "kind", "subject", "detail")

_NAME_W = 26
_ARCH_W = 12
_CELL_W = 20


def format_cell(summary: Summary) -> str:
    """``max  (mean±sigma)`` in µs with one decimal."""
    return f"{summary.max / 1000:.1f}  ({summary.mean:.1f}±{summary.sigma:.1f})"


def render_table(reports: Sequence[RunReport]) -> str:
    """Render a comparison table grouped into idle and loaded systems.

    All times are in µs. Within a group, rows are ordered by architecture
    then scenario name.

    Raises:
        EmptyInput: If ``reports`` is empty
    """
    if not reports:
        raise EmptyInput("no reports to tabulate")
    width = _NAME_W + _ARCH_W + 2 * _CELL_W + 3
    lines = [
        "Latency measurement results. All times are in µs.",
        "",
        f"{'':<{_NAME_W}} {'':<{_ARCH_W}} {'Interrupt Latency':>{_CELL_W}} {'Context Switching':>{_CELL_W}}",
        f"{'scenario':<{_NAME_W}} {'arch':<{_ARCH_W}} {'max  (avg±σ)':>{_CELL_W}} {'max  (avg±σ)':>{_CELL_W}}",
        "-" * width,
    ]
    for title, idle in (("Idle System", True), ("Loaded System", False)):
        rows = sorted((r for r in reports if r.idle == idle), key=lambda r: (r.arch, r.scenario))
        if not rows:
            continue
        lines.append(title)
        for report in rows:
            lines.append(
                f"{report.scenario:<{_NAME_W}} {report.arch:<{_ARCH_W}} "
                f"{format_cell(report.irq_latency):>{_CELL_W}} {format_cell(report.cs_delay):>{_CELL_W}}"
            )
    return "\n".join(lines) + "\n"


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def samples_csv(samples: Iterable[LatencySample]) -> str:
    return _csv_text(
        SAMPLES_HEADER,
        ((s.n, s.irq_latency, s.cs_delay, int(s.overrun)) for s in samples),
    )


def histogram_csv(hist: Histogram) -> str:
    """One row per non-empty bucket, then the underflow and overflow totals."""
    width = hist.bucket_width
    rows: List[Sequence] = [(i, i * width, (i + 1) * width, hist.buckets[i]) for i in sorted(hist.buckets)]
    rows.append(("underflow", "", "", hist.underflow))
    rows.append(("overflow", "", "", hist.overflow))
    return _csv_text(HISTOGRAM_HEADER, rows)


def plot_data(report: RunReport) -> str:
    """Whitespace-separated columns for gnuplot: bucket start in µs, then both counts."""
    irq, cs = report.irq_histogram, report.cs_histogram
    width = irq.bucket_width
    indices = sorted(set(irq.buckets) | set(cs.buckets))
    lines = [
        f"# {report.scenario} ({report.arch}), bucket width {width / 1000:g} us",
        "# start_us irq_count cs_count",
    ]
    for i in indices:
        lines.append(f"{i * width / 1000:.3f} {irq.buckets.get(i, 0)} {cs.buckets.get(i, 0)}")
    return "\n".join(lines) + "\n"


def trace_csv(trace) -> str:
    return _csv_text(TRACE_HEADER, ((r.time, r.kind, r.subject, r.detail) for r in trace))


def report_json(report: RunReport) -> str:
    return report.model_dump_json(indent=2) + "\n"
