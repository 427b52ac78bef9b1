"""
Command-line front end: run scenarios, compare results, list presets.
"""
import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from pydantic import ValidationError

from irqsim import __version__
from irqsim.exceptions import EXIT_RUNTIME, EXIT_USAGE, ConfigError, IrqSimException, ParseError
from irqsim.harness.runner import run_scenario_file
from irqsim.models.results import RunReport
from irqsim.models.scenario import ScenarioFile, parse_scenario
from irqsim.presets import CORE_PRESETS, PTHREADS_PRESETS, VXWORKS_PRESETS, load_preset, preset_names, preset_text
from irqsim.stats.export import histogram_csv, plot_data, render_table, report_json, samples_csv, trace_csv
from irqsim.stats.summary import build_report
from irqsim.utils.files import write_text_atomic

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


def configure_logging(verbosity: int = 0) -> None:
    """Set up root logging; IRQSIM_LOG_LEVEL overrides the -v flags."""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    env_level = os.environ.get("IRQSIM_LOG_LEVEL")
    if env_level:
        level = getattr(logging, env_level.upper(), level)
    logging.basicConfig(level=level, format=LOG_FORMAT)


def resolve_scenario(ref: str) -> ScenarioFile:
    """Load a scenario from a file path or a preset name.

    Raises:
        ParseError: If a file path cannot be read
        ConfigError: If ``ref`` is neither a file nor a preset
    """
    path = Path(ref)
    if ref.endswith(".json") or os.sep in ref or path.exists():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read scenario file: {exc.strerror}", location=str(path)) from exc
        return parse_scenario(text)
    return load_preset(ref)


def with_overrides(scenario: ScenarioFile, seed: Optional[int] = None, count: Optional[int] = None) -> ScenarioFile:
    """Apply --seed/--count on top of the file values, revalidating the result."""
    measure = scenario.measure
    if seed is not None:
        measure = measure.model_copy(update={"seed": seed})
    if count is not None:
        measure = measure.model_copy(update={"interrupt_count": count})
    try:
        return ScenarioFile.model_validate({**scenario.model_dump(), "measure": measure.model_dump()})
    except ValidationError as exc:
        raise ConfigError(exc.errors()[0]["msg"]) from exc


def execute(scenario: ScenarioFile, out_dir: Optional[Path], csv: bool = False, trace: bool = False) -> RunReport:
    """Run one scenario and write its outputs into ``out_dir``.

    Args:
        scenario: Scenario to run
        out_dir: Output directory, or None to write nothing
        csv: Also write samples.csv
        trace: Also record and write trace.csv

    Returns:
        RunReport: Aggregated results
    """
    outputs = set(scenario.report.outputs)
    if csv:
        outputs.add("samples")
    if trace:
        outputs.add("trace")
    raw = run_scenario_file(scenario, trace="trace" in outputs)
    report = build_report(scenario, raw.samples, raw.counters)
    logger.info(f"{scenario.name}: {raw.counters['events']} events in {raw.wall_seconds:.2f}s wall time")
    if report.hard_limit_ok is False:
        logger.warning(
            f"{scenario.name}: max interrupt latency {report.irq_latency.max} ns exceeds "
            f"the hard limit {report.hard_limit_ns} ns"
        )
    if out_dir is None:
        return report

    if "report" in outputs:
        write_text_atomic(out_dir / "report.json", report_json(report))
    if "samples" in outputs:
        write_text_atomic(out_dir / "samples.csv", samples_csv(raw.samples))
    if "histograms" in outputs:
        write_text_atomic(out_dir / "hist_irq.csv", histogram_csv(report.irq_histogram))
        write_text_atomic(out_dir / "hist_cs.csv", histogram_csv(report.cs_histogram))
    if "plot" in outputs:
        write_text_atomic(out_dir / "hist.dat", plot_data(report))
    if "trace" in outputs and raw.trace is not None:
        write_text_atomic(out_dir / "trace.csv", trace_csv(raw.trace))
    logger.info(f"{scenario.name}: outputs written to {out_dir}")
    return report


def run_many(jobs: Sequence[Tuple[ScenarioFile, Optional[Path]]], workers: int = 1, csv=False, trace=False) -> List[RunReport]:
    """Run independent scenarios, in worker processes when ``workers`` > 1; results keep input order.

    A worker that fails re-raises its irqsim exception here.
    """
    if workers <= 1 or len(jobs) <= 1:
        return [execute(s, d, csv, trace) for s, d in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        futures = [pool.submit(execute, scenario, out_dir, csv, trace) for scenario, out_dir in jobs]
        return [future.result() for future in futures]


def load_report(ref: str) -> RunReport:
    """Read report.json from a run directory (or the file itself)."""
    path = Path(ref)
    if path.is_dir():
        path = path / "report.json"
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read report: {exc.strerror}", location=str(path)) from exc
    try:
        return RunReport.model_validate_json(text)
    except ValidationError as exc:
        raise ParseError(f"not a run report: {exc.errors()[0]['msg']}", location=str(path)) from exc


def _print_summary(report: RunReport) -> None:
    irq, cs = report.irq_latency, report.cs_delay
    print(
        f"{report.scenario} [{report.arch}, {'idle' if report.idle else 'loaded'}] "
        f"irq max {irq.max / 1000:.1f}us avg {irq.mean:.2f}us | "
        f"cs max {cs.max / 1000:.1f}us avg {cs.mean:.2f}us | overruns {irq.overrun_count}"
    )


def cmd_run(args) -> int:
    scenarios = [with_overrides(resolve_scenario(ref), args.seed, args.count) for ref in args.scenarios]
    names = [s.name for s in scenarios]
    if len(set(names)) != len(names):
        raise ConfigError("scenario names must be distinct within one run")
    base = Path(args.out)
    jobs = [(s, base if len(scenarios) == 1 and args.flat else base / s.name) for s in scenarios]
    for report in run_many(jobs, args.jobs, args.csv, args.trace):
        _print_summary(report)
    return 0


def cmd_compare(args) -> int:
    reports = [load_report(ref) for ref in args.runs]
    table = render_table(reports)
    print(table, end="")
    if args.out:
        write_text_atomic(Path(args.out) / "table.txt", table)
    return 0


def cmd_presets(args) -> int:
    if args.show:
        print(preset_text(args.show), end="")
        return 0
    for name in preset_names():
        print(name)
    return 0


def cmd_reproduce(args) -> int:
    names = list(CORE_PRESETS)
    if args.pthreads:
        names.extend(PTHREADS_PRESETS)
    if args.vxworks:
        names.extend(VXWORKS_PRESETS)
    base = Path(args.out)
    jobs = [(with_overrides(load_preset(n), args.seed, args.count), base / n) for n in names]
    reports = run_many(jobs, args.jobs, args.csv)
    table = render_table(reports)
    write_text_atomic(base / "table.txt", table)
    print(table, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irqsim",
        description="Simulate interrupt latency and context-switch delay under direct and virtualized dispatch",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug output")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run scenario files or presets")
    run.add_argument("scenarios", nargs="+", help="Scenario JSON file or preset name")
    run.add_argument("--seed", type=int, help="Override the scenario seed")
    run.add_argument("--count", type=int, help="Override interrupt_count")
    run.add_argument("--out", default="runs", help="Output directory (default: runs/<scenario>)")
    run.add_argument("--flat", action="store_true", help="With one scenario, write straight into --out")
    run.add_argument("--csv", action="store_true", help="Also write samples.csv")
    run.add_argument("--trace", action="store_true", help="Also write trace.csv")
    run.add_argument("--jobs", type=int, default=1, help="Scenarios to run in parallel")
    run.set_defaults(func=cmd_run)

    compare = sub.add_parser("compare", help="Tabulate prior runs")
    compare.add_argument("runs", nargs="+", help="Run directories or report.json files")
    compare.add_argument("--out", help="Also write table.txt into this directory")
    compare.set_defaults(func=cmd_compare)

    presets = sub.add_parser("presets", help="List the shipped presets")
    presets.add_argument("--show", metavar="NAME", help="Print one preset's scenario file")
    presets.set_defaults(func=cmd_presets)

    reproduce = sub.add_parser("reproduce", help="Run the four core presets and tabulate them")
    reproduce.add_argument("--seed", type=int, help="Override every preset's seed")
    reproduce.add_argument("--count", type=int, help="Override every preset's interrupt_count")
    reproduce.add_argument("--out", default="runs", help="Output directory")
    reproduce.add_argument("--csv", action="store_true", help="Also write samples.csv per preset")
    reproduce.add_argument("--jobs", type=int, default=1, help="Presets to run in parallel")
    reproduce.add_argument("--pthreads", action="store_true", help="Include the direct-pthreads presets")
    reproduce.add_argument("--vxworks", action="store_true", help="Include the direct-vxworks presets")
    reproduce.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    configure_logging(args.verbose)
    try:
        return args.func(args)
    except IrqSimException as exc:
        print(f"irqsim: error: {exc}", file=sys.stderr)
        logger.debug(exc.to_dict())
        return exc.exit_code
    except OSError as exc:
        print(f"irqsim: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
