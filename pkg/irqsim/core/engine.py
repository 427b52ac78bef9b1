"""
Discrete-event engine: virtual clock and time-ordered event queue.
"""
import heapq
import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, List, Optional, Tuple

from irqsim.exceptions import PastDue, TimeOverflow
from irqsim.models.distributions import MAX_TIME


class EventKind(str, Enum):
    IRQ_ASSERT = "irq-assert"
    TASK_STEP_DONE = "task-step-done"
    ISR_STEP_DONE = "isr-step-done"
    MASK_END = "mask-end"
    TIMER_FIRE = "timer-fire"
    CUSTOM = "custom"


PENDING = 0
FIRED = 1
CANCELLED = 2


@dataclass(eq=False)
class Event:
    """A scheduled future occurrence.

    Events are ordered by ``(due, seq)``; ``seq`` is unique per engine, so two
    events never compare equal.
    """
    due: int
    seq: int
    kind: EventKind
    payload: Any = None
    callback: Optional[Callable[["Event"], None]] = field(default=None, repr=False)
    state: int = PENDING

    @property
    def key(self) -> Tuple[int, int]:
        return (self.due, self.seq)

    def __lt__(self, other: "Event") -> bool:
        return self.key < other.key


# The handle returned by schedule() is the queued event itself.
EventHandle = Event


def time_add(base: int, delta: int) -> int:
    """Add a duration to a timestamp, failing instead of wrapping."""
    if delta < 0:
        raise TimeOverflow(f"negative duration {delta}")
    total = base + delta
    if total > MAX_TIME:
        raise TimeOverflow(f"{base} + {delta} exceeds the 64-bit clock")
    return total


def time_sub(later: int, earlier: int) -> int:
    """Difference of two timestamps; ``later`` must not precede ``earlier``."""
    if later < earlier:
        raise TimeOverflow(f"{later} - {earlier} is negative")
    return later - earlier


class Engine:
    """Single-threaded discrete-event engine.

    One engine belongs to one run. Everything else advances time only by
    scheduling events here.
    """

    COMPACT_THRESHOLD = 4096

    def __init__(self, record: bool = False):
        """Initialize the engine.

        Args:
            record: Keep a ``(kind, due, seq)`` log of every fired event
        """
        self.now = 0
        self._queue: List[Tuple[int, int, Event]] = []
        self._seq = itertools.count()
        self._cancelled = 0
        self._stopped = False
        self.fired_count = 0
        self.fired: Optional[List[Tuple[str, int, int]]] = [] if record else None

    def __len__(self) -> int:
        return len(self._queue) - self._cancelled

    def schedule(
        self,
        due: int,
        kind: EventKind = EventKind.CUSTOM,
        callback: Optional[Callable[[Event], None]] = None,
        payload: Any = None,
    ) -> EventHandle:
        """Queue an event.

        Args:
            due: Absolute virtual time in nanoseconds
            kind: Event kind tag
            callback: Called with the event when it fires
            payload: Kind-specific data

        Returns:
            EventHandle: Handle usable with cancel()

        Raises:
            PastDue: If ``due`` is earlier than the current time
        """
        if due < self.now:
            raise PastDue(f"event {kind.value} due at {due} but clock is at {self.now}")
        if due > MAX_TIME:
            raise TimeOverflow(f"event due at {due} exceeds the 64-bit clock")
        event = Event(due=due, seq=next(self._seq), kind=kind, payload=payload, callback=callback)
        heapq.heappush(self._queue, (due, event.seq, event))
        return event

    def schedule_in(self, delay: int, kind: EventKind = EventKind.CUSTOM, callback=None, payload=None) -> EventHandle:
        """Queue an event ``delay`` nanoseconds from now."""
        return self.schedule(time_add(self.now, delay), kind, callback, payload)

    def cancel(self, handle: EventHandle) -> bool:
        """Remove a pending event.

        Returns:
            bool: True if the event was pending, False if it already fired or was cancelled
        """
        if handle.state != PENDING:
            return False
        handle.state = CANCELLED
        self._cancelled += 1
        if self._cancelled > self.COMPACT_THRESHOLD and self._cancelled * 2 > len(self._queue):
            self._queue[:] = [entry for entry in self._queue if entry[2].state == PENDING]
            heapq.heapify(self._queue)
            self._cancelled = 0
        return True

    def step(self) -> Optional[Event]:
        """Fire the least ``(due, seq)`` pending event.

        Returns:
            Event: The fired event, or None when nothing is pending
        """
        queue = self._queue
        while queue:
            due, _, event = heapq.heappop(queue)
            if event.state == CANCELLED:
                self._cancelled -= 1
                continue
            self.now = due
            event.state = FIRED
            self.fired_count += 1
            if self.fired is not None:
                self.fired.append((event.kind.value, due, event.seq))
            if event.callback is not None:
                event.callback(event)
            return event
        return None

    def stop(self) -> None:
        """Make run() return after the current event."""
        self._stopped = True

    def run(self, until: Optional[int] = None, max_events: Optional[int] = None) -> int:
        """Fire events until the queue drains, stop() is called, or a limit is reached.

        Args:
            until: Do not fire events due after this time
            max_events: Fire at most this many events

        Returns:
            int: Number of events fired by this call
        """
        self._stopped = False
        fired = 0
        queue = self._queue
        while not self._stopped:
            if max_events is not None and fired >= max_events:
                break
            if until is not None:
                while queue and queue[0][2].state == CANCELLED:
                    heapq.heappop(queue)
                    self._cancelled -= 1
                if not queue or queue[0][0] > until:
                    break
            if self.step() is None:
                break
            fired += 1
        return fired
