"""
Simulated single CPU: interrupt lines, hard masking and the two dispatch
architectures.

The CPU executes a stack of levels. The bottom level is the base segment
owned by the kernel (a task step or a context switch); every active ISR adds
one level on top. Only the top level advances; anything below it keeps its
remaining time until it is back on top.
"""
import heapq
import itertools
import logging
from collections import Counter
from typing import Callable, Dict, Iterable, List, Optional, Union

from irqsim.core.engine import Engine, EventKind, time_add
from irqsim.core.rng import Rng, sample
from irqsim.core.trace import TraceLog
from irqsim.exceptions import (
    ArchMismatch,
    ConfigError,
    GuestContextError,
    MaskNestingError,
    NoHandler,
    SchedulerError,
    UnknownLine,
)
from irqsim.kernel.tasks import Call, Compute
from irqsim.machine.segment import Segment
from irqsim.machine.irq import (
    GuestDelivery,
    GuestPendingMark,
    IrqLine,
    IsrActivation,
    Route,
    SoftMaskState,
)
from irqsim.models.scenario import ArchConfig

logger = logging.getLogger(__name__)

# A direct handler runs inside the ISR; it may return extra body time in ns.
IsrHandler = Callable[[IsrActivation], Optional[int]]
# A guest handler returns the steps the guest runs for one delivery.
GuestHandler = Callable[[GuestDelivery], Iterable]

RT_CORE = "rt-core"


class MaskGuard:
    """Scoped hard-mask section; releasing it re-enables dispatch."""

    __slots__ = ("machine", "subsystem", "released")

    def __init__(self, machine: "Machine", subsystem: str):
        self.machine = machine
        self.subsystem = subsystem
        self.released = False

    def release(self) -> None:
        if not self.released:
            self.released = True
            self.machine._leave_hard_mask(self)

    def __enter__(self) -> "MaskGuard":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.release()


class Machine:
    """One CPU with prioritised interrupt lines.

    Args:
        engine: Event engine driving the run
        arch: Dispatch architecture and its cost model
        rng: Parent generator; every line and subsystem gets its own fork
        trace: Optional execution trace
    """

    def __init__(self, engine: Engine, arch: ArchConfig, rng: Rng, trace: Optional[TraceLog] = None):
        self.engine = engine
        self.arch = arch
        self.costs = arch.costs
        self.virtualized = arch.variant == "virtualized"
        self.trace = trace
        self.kernel = None
        self.lines: Dict[int, IrqLine] = {}
        self.soft = SoftMaskState()
        self.counters: Counter = Counter()

        self._rng = rng
        self._entry_rng: Dict[int, Rng] = {}
        self._body_rng: Dict[int, Rng] = {}
        self._mask_rng: Dict[str, Rng] = {}
        self._handlers: Dict[int, IsrHandler] = {}
        self._guest_handlers: Dict[int, GuestHandler] = {}

        self._pending: List[tuple] = []
        self._pending_seq = itertools.count()
        self._isr_stack: List[IsrActivation] = []
        self._base: Optional[Segment] = None
        self._mask_subsystem: Optional[str] = None
        self._mask_depth = 0

    # -- configuration -------------------------------------------------

    def add_line(self, line: IrqLine) -> IrqLine:
        """Register an interrupt line; ids must be unique."""
        if line.id in self.lines:
            raise ConfigError(f"IRQ line id {line.id} is already registered")
        self.lines[line.id] = line
        self._entry_rng[line.id] = self._rng.fork(f"isr-entry:{line.name}")
        self._body_rng[line.id] = self._rng.fork(f"isr-body:{line.name}")
        return line

    def connect(self, line_id: int, handler: IsrHandler) -> None:
        """Attach the handler that runs inside the ISR for ``line_id``."""
        self._line(line_id)
        self._handlers[line_id] = handler

    def connect_guest(self, line_id: int, handler: GuestHandler) -> None:
        """Attach the guest-side handler for a guest-routed line."""
        line = self._line(line_id)
        if not self.virtualized:
            raise ArchMismatch("guest handlers exist only under the virtualized architecture")
        if line.route != Route.GUEST:
            raise ConfigError(f"line {line.name} is not routed to the guest")
        self._guest_handlers[line_id] = handler

    def _line(self, line_id: int) -> IrqLine:
        try:
            return self.lines[line_id]
        except KeyError:
            raise UnknownLine(f"IRQ line {line_id} is not registered") from None

    # -- state -----------------------------------------------------------

    @property
    def now(self) -> int:
        return self.engine.now

    @property
    def in_isr(self) -> bool:
        return bool(self._isr_stack)

    @property
    def masked(self) -> bool:
        return self._mask_depth > 0

    @property
    def base_segment(self) -> Optional[Segment]:
        return self._base

    @property
    def isr_depth(self) -> int:
        return len(self._isr_stack)

    def _trace(self, kind: str, subject: str, detail: str = "") -> None:
        if self.trace is not None:
            self.trace.add(self.engine.now, kind, subject, detail)

    # -- segments ----------------------------------------------------------

    def _top(self) -> Optional[Segment]:
        if self._isr_stack:
            return self._isr_stack[-1].segment
        return self._base

    def _start(self, seg: Segment) -> None:
        if seg.remaining == 0:
            self._segment_done(seg)
            return
        seg.end = time_add(self.engine.now, seg.remaining)
        if seg.guard is not None:
            kind = EventKind.MASK_END
        elif seg is self._base:
            kind = EventKind.TASK_STEP_DONE
        else:
            kind = EventKind.ISR_STEP_DONE
        seg.handle = self.engine.schedule(seg.end, kind, callback=lambda _event: self._segment_done(seg))

    def _suspend(self, seg: Optional[Segment]) -> None:
        if seg is None or seg.handle is None:
            return
        self.engine.cancel(seg.handle)
        seg.handle = None
        seg.remaining = seg.end - self.engine.now

    def _segment_done(self, seg: Segment) -> None:
        seg.handle = None
        seg.remaining = 0
        guard = seg.guard
        if guard is not None:
            seg.guard = None
            guard.release()
        if self._top() is not seg:
            # an interrupt was dispatched when the mask dropped; this level
            # finishes once it is back on top
            return
        if seg is self._base:
            self._base = None
        seg.on_done()

    def run_base(self, seg: Segment) -> None:
        """Install ``seg`` as the base level and start it unless an ISR is active."""
        if self._base is not None:
            raise SchedulerError(f"base level is busy with {self._base!r}")
        self._base = seg
        if not self._isr_stack:
            self._start(seg)

    def run_masked_base(self, subsystem: str, duration: int, on_done: Callable[[], None], owner=None) -> Segment:
        """Run a base-level critical section with interrupts hard-masked."""
        guard = self.enter_hard_mask(subsystem)
        seg = Segment(f"mask:{subsystem}", duration, on_done, owner=owner, guard=guard)
        self.run_base(seg)
        return seg

    def preempt_base(self) -> Optional[Segment]:
        """Detach the base segment, keeping its remaining time."""
        seg = self._base
        if seg is None:
            return None
        if seg.guard is not None:
            raise SchedulerError("cannot preempt a hard-masked section")
        self._suspend(seg)
        self._base = None
        return seg

    # -- hard masking ------------------------------------------------------

    def enter_hard_mask(self, subsystem: str) -> MaskGuard:
        """Disable all interrupt dispatch until the returned guard is released.

        Raises:
            MaskNestingError: If another subsystem already holds the mask
        """
        if self._mask_depth and self._mask_subsystem != subsystem:
            raise MaskNestingError(
                f"{subsystem} cannot mask inside a {self._mask_subsystem} section"
            )
        if self._mask_depth == 0:
            self._mask_subsystem = subsystem
            self._trace("mask-begin", subsystem)
            self.counters[f"mask:{subsystem}"] += 1
        self._mask_depth += 1
        return MaskGuard(self, subsystem)

    def _leave_hard_mask(self, guard: MaskGuard) -> None:
        self._mask_depth -= 1
        if self._mask_depth == 0:
            self._mask_subsystem = None
            self._trace("mask-end", guard.subsystem)
            self._try_dispatch()

    def draw_mask(self, subsystem: str, dist=None) -> int:
        """Draw a hard-mask section length for ``subsystem``, clamped to ``mask_cap``.

        ``dist`` overrides the cost model's section for that subsystem. A
        subsystem without a section draws zero.
        """
        if dist is None:
            dist = self.costs.hard_mask_sections.get(subsystem)
            if dist is None:
                return 0
        rng = self._mask_rng.get(subsystem)
        if rng is None:
            rng = self._mask_rng[subsystem] = self._rng.fork(f"mask:{subsystem}")
        return min(sample(rng, dist), self.costs.mask_cap)

    # -- interrupt path ----------------------------------------------------

    def raise_irq(self, line_id: int, at: Optional[int] = None):
        """Schedule the device-side assertion of ``line_id`` at ``at`` (default: now)."""
        line = self._line(line_id)
        due = self.engine.now if at is None else at
        return self.engine.schedule(due, EventKind.IRQ_ASSERT, callback=self._on_assert, payload=line)

    def _on_assert(self, event) -> None:
        self.assert_irq(event.payload)

    def assert_irq(self, line: Union[IrqLine, int]) -> None:
        """Assert a line at the current time and dispatch it if possible."""
        if not isinstance(line, IrqLine):
            line = self._line(line)
        self.counters[f"raised:{line.name}"] += 1
        heapq.heappush(self._pending, (-line.hw_priority, self.engine.now, next(self._pending_seq), line))
        self._try_dispatch()

    def _try_dispatch(self) -> None:
        pending = self._pending
        while pending and self._mask_depth == 0:
            neg_priority, assert_time, _, line = pending[0]
            if self._isr_stack and -neg_priority <= self._isr_stack[-1].line.hw_priority:
                return
            heapq.heappop(pending)
            self._begin_isr(line, assert_time)

    def _begin_isr(self, line: IrqLine, assert_time: int) -> None:
        if self.virtualized and line.route == Route.GUEST:
            if line.id not in self._guest_handlers:
                raise NoHandler(f"no guest handler connected to line {line.name}")
        elif line.id not in self._handlers:
            raise NoHandler(f"no handler connected to line {line.name}")
        self._suspend(self._top())
        act = IsrActivation(line=line, assert_time=assert_time, dispatched_at=self.engine.now)
        self._isr_stack.append(act)
        self.counters[f"dispatched:{line.name}"] += 1
        self._trace("isr-dispatch", line.name)
        entry = sample(self._entry_rng[line.id], self.costs.isr_entry)
        act.segment = Segment("isr-entry", entry, lambda: self._isr_entered(act))
        self._start(act.segment)

    def _isr_entered(self, act: IsrActivation) -> None:
        act.entered_at = self.engine.now
        self._trace("isr-entry", act.line.name, str(act.entered_at - act.assert_time))
        if self.virtualized:
            self.dispatch_virtualized(act)
        else:
            self.dispatch_direct(act)

    def _run_handler(self, act: IsrActivation) -> None:
        line = act.line
        handler = self._handlers.get(line.id)
        if handler is None:
            raise NoHandler(f"no handler connected to line {line.name}")
        body = sample(self._body_rng[line.id], line.isr_body)
        body += handler(act) or 0
        act.segment = Segment("isr-body", body, lambda: self._isr_exit(act))
        self._start(act.segment)

    def dispatch_direct(self, act: IsrActivation) -> IsrActivation:
        """Run the handler of an entered activation at interrupt level.

        Returns:
            IsrActivation: The activation, now executing its body

        Raises:
            ArchMismatch: Under the virtualized architecture
        """
        if self.virtualized:
            raise ArchMismatch("dispatch_direct called on a virtualized machine")
        act.outcome = "direct"
        self._run_handler(act)
        return act

    def dispatch_virtualized(self, act: IsrActivation) -> Union[IsrActivation, GuestPendingMark, GuestDelivery]:
        """Route an entered activation through the real-time core.

        RT-routed lines run their handler at interrupt level. Guest-routed
        lines are either marked pending (the guest soft-disabled them) or
        delivered to the guest task; either way the core then runs its
        bookkeeping section with interrupts hard-masked.

        Raises:
            ArchMismatch: Under the direct architecture
        """
        if not self.virtualized:
            raise ArchMismatch("dispatch_virtualized called on a direct machine")
        line = act.line
        if line.route == Route.RT:
            act.outcome = "rt"
            self._run_handler(act)
            return act

        result: Union[GuestPendingMark, GuestDelivery]
        if self.soft.is_disabled(line.id):
            result = GuestPendingMark(line=line, pending=self.soft.mark_pending(line))
            act.outcome = "pending"
            self.counters[f"guest-pending:{line.name}"] += 1
            self._trace("guest-pending", line.name, str(result.pending))
        else:
            result = GuestDelivery(line=line, drained=False)
            act.outcome = "delivered"
            self._deliver(result)

        bookkeeping = self.draw_mask(RT_CORE)
        guard = self.enter_hard_mask(RT_CORE) if bookkeeping else None
        act.segment = Segment(RT_CORE, bookkeeping, lambda: self._isr_exit(act), guard=guard)
        self._start(act.segment)
        return result

    def _deliver(self, delivery: GuestDelivery) -> None:
        if self.kernel is None:
            raise SchedulerError("guest delivery needs a kernel")
        line = delivery.line
        cost = sample(self._body_rng[line.id], line.isr_body)
        if delivery.drained:
            cost += self.costs.pending_mgmt
        steps = [Call(lambda: self.soft.count_execution(line.id)), Compute(cost)]
        steps.extend(self._guest_handlers[line.id](delivery))
        self.counters[f"guest-delivered:{line.name}"] += 1
        self._trace("guest-deliver", line.name, "drained" if delivery.drained else "")
        self.kernel.deliver_to_guest(steps)

    def _isr_exit(self, act: IsrActivation) -> None:
        popped = self._isr_stack.pop()
        if popped is not act:
            raise SchedulerError(f"ISR for {act.line.name} exited out of order")
        act.exited_at = self.engine.now
        self._trace("isr-exit", act.line.name)
        depth = self.isr_depth
        self._try_dispatch()
        if self.isr_depth > depth:
            return
        if self._isr_stack:
            self._start(self._isr_stack[-1].segment)
            return
        if self.kernel is not None:
            self.kernel.on_isr_exit()
        base = self._base
        if not self._isr_stack and base is not None and base.handle is None:
            self._start(base)

    # -- guest soft masking -------------------------------------------------

    def _soft_lines(self, line_id: Optional[int]) -> List[IrqLine]:
        if line_id is None:
            return list(self.lines.values())
        return [self._line(line_id)]

    def _check_guest(self, caller) -> None:
        if not self.virtualized:
            raise ArchMismatch("soft masking exists only under the virtualized architecture")
        if caller is not None and self.kernel is not None and caller is not self.kernel.guest:
            raise GuestContextError(f"{getattr(caller, 'name', caller)} is not the guest task")

    def soft_disable(self, line_id: Optional[int] = None, caller=None) -> int:
        """Soft-disable one line, or every line when ``line_id`` is None.

        Returns:
            int: CPU cost of the operation in the guest, in ns
        """
        self._check_guest(caller)
        for line in self._soft_lines(line_id):
            self.soft.disabled[line.id] = True
        self.counters["soft-disable"] += 1
        return self.costs.soft_toggle

    def soft_enable(self, line_id: Optional[int] = None, caller=None) -> int:
        """Soft-enable lines and deliver what was held back while they were off.

        Pending guest lines are delivered in hw_priority order, highest first,
        ties by line id.

        Returns:
            int: CPU cost of the operation in the guest, in ns
        """
        self._check_guest(caller)
        lines = self._soft_lines(line_id)
        for line in lines:
            self.soft.disabled[line.id] = False
        for line in sorted(lines, key=lambda l: (-l.hw_priority, l.id)):
            if line.route != Route.GUEST:
                continue
            for _ in range(self.soft.take_pending(line.id)):
                self.counters[f"guest-drained:{line.name}"] += 1
                self._deliver(GuestDelivery(line=line, drained=True))
        self.counters["soft-enable"] += 1
        return self.costs.soft_toggle
