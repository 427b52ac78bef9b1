"""
Background load: a flood of network interrupts and a serial copier.

Under the direct architecture both loads are RTOS tasks that hard-mask
interrupts around their driver sections. Under the virtualized architecture
they live inside the guest and only ever soft-mask.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from irqsim.core.engine import EventKind
from irqsim.core.rng import Rng, sample
from irqsim.kernel.scheduler import Kernel
from irqsim.kernel.tasks import Compute, HardMask, IoTrigger, Semaphore, SoftDisable, SoftEnable, Task, Wait
from irqsim.machine.irq import GuestDelivery, IrqLine, IsrActivation, Route, Trigger
from irqsim.machine.machine import Machine
from irqsim.models.scenario import LoadSpec, NetStorm, SerialCopier

logger = logging.getLogger(__name__)

NET_LINE = 1
SERIAL_LINE = 2


@dataclass(eq=False)
class LoadGenerators:
    """Handles to whatever load was installed, for tests and counters."""
    lines: Dict[str, IrqLine] = field(default_factory=dict)
    tasks: Dict[str, Task] = field(default_factory=dict)
    semaphores: Dict[str, Semaphore] = field(default_factory=dict)
    guest: Optional[Task] = None
    arrivals: int = 0


class NetArrivals:
    """Network packets arriving with random gaps; each raises the net line."""

    def __init__(self, machine: Machine, line: IrqLine, storm: NetStorm, rng: Rng, loads: LoadGenerators):
        self.machine = machine
        self.line = line
        self.storm = storm
        self.rng = rng
        self.loads = loads

    def start(self) -> None:
        self._schedule_next()

    def _schedule_next(self) -> None:
        gap = sample(self.rng, self.storm.irq_rate)
        self.machine.engine.schedule_in(gap, EventKind.CUSTOM, callback=self._arrive)

    def _arrive(self, _event) -> None:
        self.loads.arrivals += 1
        self.machine.assert_irq(self.line)
        self._schedule_next()


def _line(line_id: int, name: str, hw_priority: int, trigger: str, route: Route, body) -> IrqLine:
    return IrqLine(id=line_id, name=name, hw_priority=hw_priority, trigger=Trigger(trigger), route=route, isr_body=body)


def _line_body(machine: Machine, name: str, default):
    return machine.costs.isr_body.get(name, default)


def _install_direct(machine: Machine, kernel: Kernel, load: LoadSpec, rng: Rng, loads: LoadGenerators) -> None:
    costs = machine.costs
    storm, copier = load.net_storm, load.serial_copier

    if storm.enabled:
        line = machine.add_line(
            _line(NET_LINE, "net", storm.hw_priority, storm.trigger, Route.RT, _line_body(machine, "net", storm.isr_body))
        )
        rx = kernel.create_semaphore("net-rx")

        def net_isr(act: IsrActivation) -> None:
            kernel.sem_release(rx, from_isr=True)

        machine.connect(NET_LINE, net_isr)
        work_rng = rng.fork("net-work")

        def net_rx_task():
            while True:
                yield Wait(rx.id)
                yield HardMask("net-driver", machine.draw_mask("net-driver", storm.mask_section))
                yield Compute(sample(work_rng, storm.kernel_work))
                yield HardMask("kernel-sync", machine.draw_mask("kernel-sync"))

        loads.lines["net"] = line
        loads.semaphores["net-rx"] = rx
        loads.tasks["net-rx"] = kernel.create_task(
            "net-rx", storm.task_priority, net_rx_task(),
            context_cost=costs.context_cost, wrapper_overhead=costs.wrapper_overhead,
        )
        NetArrivals(machine, line, storm, rng.fork("net-arrivals"), loads).start()

    if copier.enabled:
        line = machine.add_line(
            _line(SERIAL_LINE, "serial", copier.hw_priority, copier.trigger, Route.RT,
                  _line_body(machine, "serial", copier.serial_irq))
        )
        tx = kernel.create_semaphore("serial-tx")

        def serial_isr(act: IsrActivation) -> None:
            kernel.sem_release(tx, from_isr=True)

        machine.connect(SERIAL_LINE, serial_isr)
        copy_rng = rng.fork("serial-copier")

        def copier_task():
            while True:
                yield Compute(sample(copy_rng, copier.chunk_work))
                yield HardMask("serial-driver", machine.draw_mask("serial-driver", copier.mask_section))
                yield IoTrigger(SERIAL_LINE, sample(copy_rng, copier.tx_delay))
                yield Wait(tx.id)

        loads.lines["serial"] = line
        loads.semaphores["serial-tx"] = tx
        loads.tasks["serial-copier"] = kernel.create_task(
            "serial-copier", copier.priority, copier_task(),
            context_cost=costs.context_cost, wrapper_overhead=costs.wrapper_overhead,
        )


def _install_virtualized(machine: Machine, kernel: Kernel, load: LoadSpec, rng: Rng, loads: LoadGenerators) -> None:
    costs = machine.costs
    storm, copier = load.net_storm, load.serial_copier
    guest_rng = rng.fork("guest")

    if storm.enabled:
        line = machine.add_line(
            _line(NET_LINE, "net", storm.hw_priority, storm.trigger, Route.GUEST,
                  _line_body(machine, "net", storm.isr_body))
        )
        work_rng = rng.fork("net-work")

        def net_handler(delivery: GuestDelivery) -> List:
            return [
                SoftDisable(),
                Compute(sample(work_rng, storm.mask_section)),
                SoftEnable(),
                Compute(sample(work_rng, storm.kernel_work)),
            ]

        machine.connect_guest(NET_LINE, net_handler)
        loads.lines["net"] = line
        NetArrivals(machine, line, storm, rng.fork("net-arrivals"), loads).start()

    if copier.enabled:
        line = machine.add_line(
            _line(SERIAL_LINE, "serial", copier.hw_priority, copier.trigger, Route.GUEST,
                  _line_body(machine, "serial", copier.serial_irq))
        )
        machine.connect_guest(SERIAL_LINE, lambda delivery: [])
        loads.lines["serial"] = line

    def guest_body():
        while True:
            if not copier.enabled:
                yield Compute(costs.guest_idle_slice)
                continue
            yield Compute(sample(guest_rng, copier.chunk_work))
            yield SoftDisable()
            yield Compute(sample(guest_rng, copier.mask_section))
            yield SoftEnable()
            tx_delay = sample(guest_rng, copier.tx_delay)
            yield IoTrigger(SERIAL_LINE, tx_delay)
            yield Compute(tx_delay)

    loads.guest = kernel.create_guest(guest_body(), context_cost=costs.context_cost)


def install_loads(machine: Machine, kernel: Kernel, load: LoadSpec, rng: Rng) -> LoadGenerators:
    """Install the configured background load for the machine's architecture.

    The virtualized architecture always gets a guest task, loaded or not.

    Args:
        machine: Machine the load interrupts
        kernel: Kernel hosting the load tasks
        load: Which loads are enabled and their parameters
        rng: Parent generator; each load draws from its own fork

    Returns:
        LoadGenerators: Lines, tasks and semaphores that were created
    """
    loads = LoadGenerators()
    if machine.virtualized:
        _install_virtualized(machine, kernel, load, rng, loads)
    else:
        _install_direct(machine, kernel, load, rng, loads)
    logger.debug(
        f"loads installed: lines={sorted(loads.lines)} tasks={sorted(loads.tasks)} guest={loads.guest is not None}"
    )
    return loads
