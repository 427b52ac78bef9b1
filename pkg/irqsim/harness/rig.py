"""
Measurement rig: a periodic timer interrupt and the task it wakes.

For every timer raise the ISR records how long the interrupt took to be
entered, then releases a semaphore; the measurement task records how long it
took from that release until it was running.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, List, Optional, Tuple

from irqsim.core.engine import EventKind
from irqsim.exceptions import ConfigError
from irqsim.kernel.scheduler import Kernel
from irqsim.kernel.tasks import Call, Compute, Semaphore, Task, Wait
from irqsim.machine.irq import IrqLine, IsrActivation, Route, Trigger
from irqsim.machine.machine import Machine
from irqsim.models.distributions import ZERO
from irqsim.models.results import LatencySample
from irqsim.models.scenario import MeasureConfig

logger = logging.getLogger(__name__)

TIMER_LINE = 0


@dataclass(eq=False)
class TestRig:
    machine: Machine
    kernel: Kernel
    config: MeasureConfig
    timer_line: IrqLine
    semaphore: Optional[Semaphore] = None
    task: Optional[Task] = None
    samples: List[LatencySample] = field(default_factory=list)
    fired: int = 0
    entered: int = 0
    open_cycles: int = 0
    done: bool = False
    _released: Deque[Tuple[int, int, int, bool]] = field(default_factory=deque, repr=False)

    __test__ = False

    @property
    def overruns(self) -> int:
        return sum(1 for s in self.samples if s.overrun)

    def _fire(self, event) -> None:
        k = event.payload
        self.fired = k
        self.machine.assert_irq(self.timer_line)
        if k < self.config.interrupt_count:
            self.machine.engine.schedule(
                self.config.fire_time(k + 1), EventKind.TIMER_FIRE, callback=self._fire, payload=k + 1
            )

    def timer_isr(self, act: IsrActivation) -> int:
        """Timer handler: record the interrupt latency and wake the measurement task."""
        self.entered += 1
        now = self.machine.now
        overrun = self.open_cycles > 0
        self.open_cycles += 1
        self._released.append((self.entered, act.entered_at - act.assert_time, now, overrun))
        self.kernel.sem_release(self.semaphore, from_isr=True)
        return 0

    def _record(self) -> None:
        n, irq_latency, released_at, overrun = self._released.popleft()
        self.samples.append(LatencySample(n, irq_latency, self.machine.now - released_at, overrun))
        if len(self.samples) >= self.config.interrupt_count:
            self.done = True
            self.machine.engine.stop()

    def _cycle_end(self) -> None:
        self.open_cycles -= 1

    def measurement_task_body(self):
        """Script of the measurement task: wait, record, optionally work, repeat."""
        while len(self.samples) < self.config.interrupt_count:
            yield Wait(self.semaphore.id)
            yield Call(self._record)
            if self.config.mt_work:
                yield Compute(self.config.mt_work)
            yield Call(self._cycle_end)


def setup(machine: Machine, kernel: Kernel, config: MeasureConfig) -> TestRig:
    """Install the timer line, its handler and the measurement task.

    The timer fires at ``k * 1e9 // rate_hz`` ns for k = 1..interrupt_count.

    Args:
        machine: Machine to install the timer on
        kernel: Kernel that runs the measurement task
        config: Measurement parameters

    Returns:
        TestRig: Rig collecting one LatencySample per timer interrupt

    Raises:
        ConfigError: If the rate or count is not positive, or the warm-up
            would discard every sample
    """
    if config.rate_hz <= 0:
        raise ConfigError("rate_hz must be positive")
    if config.interrupt_count <= 0:
        raise ConfigError("interrupt_count must be positive")
    if config.warmup_discard >= config.interrupt_count:
        raise ConfigError(
            f"warmup_discard {config.warmup_discard} leaves no samples out of {config.interrupt_count}"
        )
    for task in kernel.tasks.values():
        if task is not kernel.idle and task.priority >= config.mt_priority:
            raise ConfigError(f"task {task.name} does not rank below the measurement task")

    costs = machine.costs
    line = machine.add_line(
        IrqLine(
            id=TIMER_LINE,
            name="timer",
            hw_priority=machine.arch.timer_hw_priority,
            trigger=Trigger.EDGE,
            route=Route.RT,
            isr_body=costs.isr_body.get("timer", ZERO),
        )
    )
    rig = TestRig(machine=machine, kernel=kernel, config=config, timer_line=line)
    machine.connect(TIMER_LINE, rig.timer_isr)
    rig.semaphore = kernel.create_semaphore("measure")
    rig.task = kernel.create_task(
        "MT",
        config.mt_priority,
        rig.measurement_task_body(),
        context_cost=costs.context_cost,
        wrapper_overhead=costs.wrapper_overhead,
    )
    machine.engine.schedule(config.fire_time(1), EventKind.TIMER_FIRE, callback=rig._fire, payload=1)
    logger.debug(
        f"timer at {config.rate_hz} Hz for {config.interrupt_count} interrupts, MT priority {config.mt_priority}"
    )
    return rig
