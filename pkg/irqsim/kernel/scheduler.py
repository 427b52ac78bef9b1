"""
Preemptive fixed-priority kernel with counting semaphores.

The highest-priority ready task owns the CPU; ties go to the task that has
been ready longest. Rescheduling requested while an ISR is active or the CPU
is hard-masked is deferred to the ISR epilogue or the end of the section.
"""
import itertools
import logging
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Union

from irqsim.core.engine import Engine, EventKind, time_add
from irqsim.core.rng import Rng, sample
from irqsim.core.trace import TraceLog
from irqsim.exceptions import SchedulerError, UnknownSemaphore
from irqsim.kernel.tasks import (
    IDLE_PRIORITY,
    Call,
    Compute,
    HardMask,
    IoTrigger,
    Release,
    Resume,
    Semaphore,
    Sleep,
    SoftDisable,
    SoftEnable,
    Task,
    TaskState,
    Wait,
)
from irqsim.machine.segment import Segment
from irqsim.models.distributions import ZERO
from irqsim.models.scenario import GUEST_PRIORITY

if TYPE_CHECKING:
    from irqsim.machine.machine import Machine

logger = logging.getLogger(__name__)

TaskRef = Union[Task, int]
SemRef = Union[Semaphore, int]


class Kernel:
    """RTOS kernel bound to one machine.

    Args:
        engine: Event engine shared with the machine
        machine: CPU the tasks run on
        sched_decide: Cost of one scheduling decision, in ns
        rng: Parent generator for per-task cost streams
        trace: Optional execution trace
        idle_context_cost: Save/restore cost of the idle task
    """

    def __init__(
        self,
        engine: Engine,
        machine: "Machine",
        sched_decide: int = 0,
        rng: Optional[Rng] = None,
        trace: Optional[TraceLog] = None,
        idle_context_cost=ZERO,
    ):
        self.engine = engine
        self.machine = machine
        self.sched_decide = sched_decide
        self.trace = trace
        self._rng = rng if rng is not None else Rng(0)
        self._task_ids = itertools.count()
        self._sem_ids = itertools.count()
        self._ready_seq = itertools.count()
        self.tasks: Dict[int, Task] = {}
        self.semaphores: Dict[int, Semaphore] = {}
        self.ready: List[Task] = []
        self.guest: Optional[Task] = None
        self.switches = 0
        self.wakeups = 0
        self._switching: Optional[Task] = None
        self._need_resched = False
        self._started = False

        machine.kernel = self
        self.idle = self._new_task("idle", IDLE_PRIORITY, None, idle_context_cost, ZERO, False)
        self.idle.state = TaskState.RUNNING
        self.current = self.idle
        self._begin_run(self.idle)

    # -- objects -------------------------------------------------------------

    def _new_task(self, name, priority, script, context_cost, wrapper_overhead, is_guest) -> Task:
        task_id = next(self._task_ids)
        task = Task(
            id=task_id,
            name=name,
            priority=priority,
            script=iter(script) if script is not None else None,
            context_cost=context_cost,
            wrapper_overhead=wrapper_overhead,
            rng=self._rng.fork(f"task:{name}"),
            is_guest=is_guest,
        )
        self.tasks[task_id] = task
        return task

    def create_task(
        self,
        name: str,
        priority: int,
        script: Iterable,
        context_cost=ZERO,
        wrapper_overhead=ZERO,
    ) -> Task:
        """Create a ready task.

        Args:
            name: Unique task name, used in traces
            priority: Larger is more urgent
            script: Iterable of steps
            context_cost: Distribution of save/restore cost for this task
            wrapper_overhead: Extra cost paid each time the task is switched in

        Returns:
            Task: The new task, already on the ready queue
        """
        if any(t.name == name for t in self.tasks.values()):
            raise SchedulerError(f"task name '{name}' is taken")
        if priority <= IDLE_PRIORITY:
            raise SchedulerError(f"priority {priority} is reserved for the idle task")
        if self.guest is not None and priority <= self.guest.priority:
            raise SchedulerError(f"task '{name}' must outrank the guest")
        task = self._new_task(name, priority, script, context_cost, wrapper_overhead, False)
        self._make_ready(task)
        if self._started:
            self._request_resched()
        return task

    def create_guest(self, script: Iterable, context_cost=ZERO, name: str = "guest") -> Task:
        """Create the guest task that hosts the general-purpose OS.

        The guest always runs below every real-time task.
        """
        if self.guest is not None:
            raise SchedulerError("a guest task already exists")
        if any(t.priority <= GUEST_PRIORITY for t in self.tasks.values() if t is not self.idle):
            raise SchedulerError("every real-time task must outrank the guest")
        task = self._new_task(name, GUEST_PRIORITY, script, context_cost, ZERO, True)
        self.guest = task
        self._make_ready(task)
        if self._started:
            self._request_resched()
        return task

    def create_semaphore(self, name: str, count: int = 0) -> Semaphore:
        if count < 0:
            raise SchedulerError("semaphore count cannot be negative")
        sem = Semaphore(id=next(self._sem_ids), name=name, count=count)
        self.semaphores[sem.id] = sem
        return sem

    def _task(self, ref: TaskRef) -> Task:
        if isinstance(ref, Task):
            return ref
        try:
            return self.tasks[ref]
        except KeyError:
            raise SchedulerError(f"unknown task {ref}") from None

    def _sem(self, ref: SemRef) -> Semaphore:
        if isinstance(ref, Semaphore):
            return ref
        try:
            return self.semaphores[ref]
        except KeyError:
            raise UnknownSemaphore(f"semaphore {ref} does not exist") from None

    def _trace(self, kind: str, subject: str, detail: str = "") -> None:
        if self.trace is not None:
            self.trace.add(self.engine.now, kind, subject, detail)

    # -- scheduling --------------------------------------------------------------

    def start(self) -> None:
        """Hand the CPU to the highest-priority ready task."""
        self._started = True
        self.reschedule()

    def _make_ready(self, task: Task) -> None:
        task.state = TaskState.READY
        task.ready_since = self.engine.now
        task.ready_seq = next(self._ready_seq)
        self.ready.append(task)
        self._trace("ready", task.name)

    def pick_next(self) -> Task:
        """Highest priority first, then longest ready; idle when nothing else is ready."""
        if not self.ready:
            return self.current
        return min(self.ready, key=lambda t: (-t.priority, t.ready_since, t.ready_seq))

    def _request_resched(self) -> None:
        if self.machine.in_isr or self.machine.masked:
            self._need_resched = True
        else:
            self.reschedule()

    def reschedule(self) -> None:
        """Give the CPU to the best ready task if the current one must yield."""
        if self._switching is not None:
            return
        if self.machine.in_isr or self.machine.masked:
            self._need_resched = True
            return
        self._need_resched = False
        current = self.current
        if not self.ready:
            return
        best = self.pick_next()
        if current.state == TaskState.RUNNING:
            if best.priority <= current.priority:
                return
            seg = self.machine.preempt_base()
            if seg is not None:
                current.front.appendleft(Resume(seg))
            self._make_ready(current)
        self._end_run(current)
        self._start_switch(current, best)

    def context_switch(self, from_task: TaskRef, to_task: TaskRef) -> int:
        """Cost of switching the CPU from one task to another, in ns.

        Raises:
            SchedulerError: If both tasks are the same
        """
        src, dst = self._task(from_task), self._task(to_task)
        if src is dst:
            raise SchedulerError(f"context switch from {src.name} to itself")
        cost = self.sched_decide
        cost += sample(src.rng, src.context_cost)
        cost += sample(dst.rng, dst.context_cost)
        cost += sample(dst.rng, dst.wrapper_overhead)
        return cost

    def _start_switch(self, src: Task, dst: Task) -> None:
        self.ready.remove(dst)
        self._trace("switch", dst.name, src.name)
        cost = self.context_switch(src, dst)
        self._switching = dst
        self.machine.run_base(Segment("switch", cost, lambda: self._switch_done(dst)))

    def _switch_done(self, task: Task) -> None:
        self._switching = None
        if self.ready:
            best = self.pick_next()
            if best.priority > task.priority:
                # something more urgent became ready while switching
                self._make_ready(task)
                self._start_switch(task, best)
                return
        self.current = task
        task.state = TaskState.RUNNING
        task.epoch += 1
        task.dispatches += 1
        self.switches += 1
        self._begin_run(task)
        self._run(task)

    def _begin_run(self, task: Task) -> None:
        task.last_start = self.engine.now
        self._trace("run-begin", task.name)

    def _end_run(self, task: Task) -> None:
        task.run_time += self.engine.now - task.last_start
        self._trace("run-end", task.name)

    def on_isr_exit(self) -> None:
        """ISR epilogue: run deferred rescheduling, then redirect the guest to new deliveries."""
        if self._need_resched:
            self.reschedule()
        current = self.current
        if (
            current.incoming
            and current.state == TaskState.RUNNING
            and self._switching is None
            and not self.machine.masked
        ):
            seg = self.machine.base_segment
            if seg is not None and seg.owner is current:
                self.machine.preempt_base()
                current.front.appendleft(Resume(seg))
                self._run(current)

    # -- semaphores ----------------------------------------------------------------

    def sem_wait(self, task: TaskRef, sem: SemRef) -> bool:
        """Take a unit from ``sem`` or block ``task`` on it.

        Returns:
            bool: True if the unit was taken, False if the task blocked
        """
        task, sem = self._task(task), self._sem(sem)
        if task is not self.current or task.state != TaskState.RUNNING:
            raise SchedulerError(f"{task.name} is not running")
        if sem.count > 0:
            sem.count -= 1
            sem.acquired += 1
            return True
        task.state = TaskState.BLOCKED
        sem.waiters.append((-task.priority, self.engine.now, next(self._ready_seq), task))
        sem.waiters.sort(key=lambda w: w[:3])
        self._trace("block", sem.name, task.name)
        self.reschedule()
        return False

    def sem_release(self, sem: SemRef, from_isr: bool = False) -> Optional[Task]:
        """Release one unit of ``sem``.

        The best waiter is woken, otherwise the count goes up. A woken task
        that outranks the current one preempts it immediately from task
        context, or at the ISR epilogue when released from an ISR.

        Returns:
            Task: The woken task, or None if nobody was waiting
        """
        sem = self._sem(sem)
        sem.released += 1
        self._trace("release", sem.name)
        if not sem.waiters:
            sem.count += 1
            return None
        task = sem.waiters.pop(0)[3]
        sem.acquired += 1
        self.wakeups += 1
        self._make_ready(task)
        self._trace("wake", sem.name, task.name)
        if from_isr or self.machine.in_isr or self.machine.masked:
            self._need_resched = True
        else:
            self.reschedule()
        return task

    def _wake_sleeper(self, task: Task) -> None:
        self._make_ready(task)
        self._request_resched()

    # -- guest -------------------------------------------------------------------

    def deliver_to_guest(self, steps: Iterable) -> None:
        """Queue steps the guest runs before resuming its interrupted work."""
        if self.guest is None:
            raise SchedulerError("no guest task to deliver to")
        self.guest.incoming.extend(steps)

    # -- execution -----------------------------------------------------------------

    def _run(self, task: Task) -> None:
        """Execute ``task``'s steps until one of them occupies the CPU or it yields."""
        if task.script is None and not task.front and not task.incoming:
            return
        epoch = task.epoch
        machine = self.machine
        while self.current is task and task.state == TaskState.RUNNING and task.epoch == epoch:
            if self._need_resched and not machine.in_isr and not machine.masked:
                self.reschedule()
                continue
            if task.incoming:
                task.front.extendleft(reversed(task.incoming))
                task.incoming.clear()
            if task.front:
                step = task.front.popleft()
            else:
                try:
                    step = next(task.script)
                except StopIteration:
                    self._finish(task)
                    return
            if self._execute(task, step):
                return

    def _finish(self, task: Task) -> None:
        task.state = TaskState.FINISHED
        self._trace("finish", task.name)
        self.reschedule()

    def _segment_done(self, task: Task) -> None:
        self._run(task)

    def _execute(self, task: Task, step) -> bool:
        machine = self.machine
        kind = type(step)
        if kind is Compute:
            if step.duration <= 0:
                return False
            machine.run_base(Segment("compute", step.duration, lambda: self._segment_done(task), owner=task))
            return True
        if kind is Resume:
            machine.run_base(step.segment)
            return True
        if kind is Wait:
            return not self.sem_wait(task, step.sem)
        if kind is Release:
            self.sem_release(step.sem)
            return False
        if kind is Call:
            step.fn()
            return False
        if kind is HardMask:
            if step.duration <= 0:
                return False
            machine.run_masked_base(step.subsystem, step.duration, lambda: self._segment_done(task), owner=task)
            return True
        if kind is SoftDisable or kind is SoftEnable:
            toggle = machine.soft_disable if kind is SoftDisable else machine.soft_enable
            cost = toggle(step.line, caller=task)
            if cost <= 0:
                return False
            machine.run_base(Segment("soft-toggle", cost, lambda: self._segment_done(task), owner=task))
            return True
        if kind is IoTrigger:
            machine.raise_irq(step.line, at=time_add(self.engine.now, step.delay))
            return False
        if kind is Sleep:
            task.state = TaskState.SLEEPING
            self.engine.schedule(
                time_add(self.engine.now, step.duration),
                EventKind.CUSTOM,
                callback=lambda _event: self._wake_sleeper(task),
            )
            self.reschedule()
            return True
        raise SchedulerError(f"{task.name} yielded an unknown step {step!r}")

    # -- reporting ---------------------------------------------------------------------

    def counters(self) -> Dict[str, int]:
        return {
            "context-switches": self.switches,
            "wakeups": self.wakeups,
        }
