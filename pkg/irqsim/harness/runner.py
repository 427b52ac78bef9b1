"""
One simulated run from configuration to raw samples.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from irqsim.core.engine import Engine
from irqsim.core.rng import Rng
from irqsim.core.trace import TraceLog
from irqsim.exceptions import ConfigError, IrqSimException
from irqsim.harness.loads import LoadGenerators, install_loads
from irqsim.harness.rig import TestRig, setup
from irqsim.kernel.scheduler import Kernel
from irqsim.machine.machine import Machine
from irqsim.models.results import LatencySample
from irqsim.models.scenario import ArchConfig, LoadSpec, MeasureConfig, ScenarioFile, priority_problems

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class RawRun:
    """Everything one run produced before aggregation."""
    scenario: ScenarioFile
    samples: List[LatencySample]
    counters: Dict[str, int] = field(default_factory=dict)
    trace: Optional[TraceLog] = None
    rig: Optional[TestRig] = field(default=None, repr=False)
    loads: Optional[LoadGenerators] = field(default=None, repr=False)
    kernel: Optional[Kernel] = field(default=None, repr=False)
    machine: Optional[Machine] = field(default=None, repr=False)
    end_time: int = 0
    wall_seconds: float = 0.0


def run_scenario(
    arch: ArchConfig,
    load: LoadSpec,
    measure: MeasureConfig,
    name: str = "adhoc",
    trace: bool = False,
) -> RawRun:
    """Simulate one scenario and collect its samples.

    The result depends only on the arguments; in particular every random
    draw comes from streams forked off ``measure.seed``.

    Args:
        arch: Dispatch architecture and cost model
        load: Background load
        measure: Timer and measurement-task parameters
        name: Scenario name carried into the result
        trace: Keep a full execution trace

    Returns:
        RawRun: Samples (exactly ``interrupt_count`` of them), counters and optional trace

    Raises:
        ConfigError: If the priorities or measurement parameters are unusable
    """
    problems = priority_problems(arch, load, measure)
    if problems:
        raise ConfigError(problems[0])
    scenario = ScenarioFile(name=name, arch=arch, load=load, measure=measure)
    logger.info(
        f"running {name}: arch={arch.variant} load={'idle' if load.idle else 'loaded'} "
        f"count={measure.interrupt_count} seed={measure.seed}"
    )

    started = time.perf_counter()
    engine = Engine()
    rng = Rng(measure.seed)
    trace_log = TraceLog() if trace else None
    machine = Machine(engine, arch, rng.fork("machine"), trace_log)
    kernel = Kernel(
        engine, machine, arch.costs.sched_decide, rng.fork("kernel"), trace_log,
        idle_context_cost=arch.costs.context_cost,
    )
    loads = install_loads(machine, kernel, load, rng.fork("load"))
    rig = setup(machine, kernel, measure)
    kernel.start()
    engine.run()
    if not rig.done:
        raise IrqSimException(
            f"{name}: run ended after {len(rig.samples)} of {measure.interrupt_count} samples",
            error_code="IRQSIM_INCOMPLETE_RUN",
        )

    counters = dict(machine.counters)
    counters.update(kernel.counters())
    counters["events"] = engine.fired_count
    counters["overruns"] = rig.overruns
    counters["net-arrivals"] = loads.arrivals
    for line_id, executed in machine.soft.executed.items():
        counters[f"guest-executed:{machine.lines[line_id].name}"] = executed

    elapsed = time.perf_counter() - started
    logger.debug(f"{name}: {engine.fired_count} events, {engine.now} ns simulated")
    return RawRun(
        scenario=scenario,
        samples=rig.samples,
        counters=counters,
        trace=trace_log,
        rig=rig,
        loads=loads,
        kernel=kernel,
        machine=machine,
        end_time=engine.now,
        wall_seconds=elapsed,
    )


def run_scenario_file(scenario: ScenarioFile, trace: bool = False) -> RawRun:
    """Run a parsed scenario file, keeping its report settings on the result."""
    raw = run_scenario(scenario.arch, scenario.load, scenario.measure, name=scenario.name, trace=trace)
    raw.scenario = scenario
    return raw
