"""
Tasks, semaphores and the steps a task script yields.

A script is any iterator of steps. Durations are integers in nanoseconds and
are drawn by the script itself, so each task consumes its own random stream.
"""
import sys
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Deque, Iterator, List, Optional

from irqsim.core.rng import Rng
from irqsim.models.distributions import ZERO

IDLE_PRIORITY = -sys.maxsize


class TaskState(str, Enum):
    RUNNING = "running"
    READY = "ready"
    BLOCKED = "blocked"
    SLEEPING = "sleeping"
    FINISHED = "finished"


@dataclass(frozen=True)
class Compute:
    duration: int


@dataclass(frozen=True)
class Wait:
    sem: int


@dataclass(frozen=True)
class Release:
    sem: int


@dataclass(frozen=True)
class Sleep:
    duration: int


@dataclass(frozen=True)
class HardMask:
    """Compute for ``duration`` with all interrupt dispatch disabled."""
    subsystem: str
    duration: int


@dataclass(frozen=True)
class SoftDisable:
    """Guest only: soft-disable ``line`` (None = every line)."""
    line: Optional[int] = None


@dataclass(frozen=True)
class SoftEnable:
    """Guest only: soft-enable ``line`` (None = every line)."""
    line: Optional[int] = None


@dataclass(frozen=True)
class IoTrigger:
    """Ask a device to raise ``line`` after ``delay``."""
    line: int
    delay: int = 0


@dataclass(frozen=True)
class Call:
    """Run a zero-time callback in task context."""
    fn: Callable[[], Any]


@dataclass(frozen=True)
class Resume:
    """Continue a segment that was preempted part-way."""
    segment: Any


@dataclass(eq=False)
class Task:
    id: int
    name: str
    priority: int
    script: Optional[Iterator] = field(default=None, repr=False)
    context_cost: Any = ZERO
    wrapper_overhead: Any = ZERO
    rng: Optional[Rng] = field(default=None, repr=False)
    is_guest: bool = False
    state: TaskState = TaskState.READY
    ready_since: int = 0
    ready_seq: int = 0
    epoch: int = 0
    run_time: int = 0
    last_start: int = 0
    dispatches: int = 0
    front: Deque = field(default_factory=deque, repr=False)
    incoming: List = field(default_factory=list, repr=False)

    @property
    def is_idle(self) -> bool:
        return self.priority == IDLE_PRIORITY


@dataclass(eq=False)
class Semaphore:
    """Counting semaphore; waiters are kept by priority, then by block time."""
    id: int
    name: str
    count: int = 0
    waiters: List[tuple] = field(default_factory=list, repr=False)
    released: int = 0
    acquired: int = 0
