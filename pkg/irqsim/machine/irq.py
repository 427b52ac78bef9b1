"""
Interrupt-line and dispatch-outcome types.
"""
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

from irqsim.models.distributions import ZERO, DistributionSpec


class Trigger(str, Enum):
    EDGE = "edge"
    LEVEL = "level"


class Route(str, Enum):
    RT = "rt"
    GUEST = "guest"


@dataclass(frozen=True)
class IrqLine:
    """A hardware interrupt line.

    Higher ``hw_priority`` preempts lower. ``route`` only matters under the
    virtualized architecture: RT lines go to real-time handlers, guest lines
    are soft-masked and delivered to the guest task.
    """
    id: int
    name: str
    hw_priority: int
    trigger: Trigger = Trigger.EDGE
    route: Route = Route.RT
    isr_body: DistributionSpec = ZERO


@dataclass(eq=False)
class IsrActivation:
    """One execution of the hardware interrupt path for one raise."""
    line: IrqLine
    assert_time: int
    dispatched_at: int
    entered_at: Optional[int] = None
    exited_at: Optional[int] = None
    segment: object = field(default=None, repr=False)
    outcome: str = ""

    @property
    def latency(self) -> Optional[int]:
        if self.entered_at is None:
            return None
        return self.entered_at - self.assert_time


@dataclass(frozen=True)
class GuestPendingMark:
    """A guest-routed raise held back because the guest soft-disabled the line."""
    line: IrqLine
    pending: int


@dataclass(frozen=True)
class GuestDelivery:
    """A guest-routed raise handed to the guest task.

    ``drained`` is True when the raise had been pending and is delivered by a
    soft_enable; those deliveries pay ``pending_mgmt``.
    """
    line: IrqLine
    drained: bool = False


class SoftMaskState:
    """Per-line guest view of interrupt enablement."""

    def __init__(self):
        self.disabled: Dict[int, bool] = {}
        self.pending: Dict[int, int] = {}
        self.executed: Counter = Counter()

    def is_disabled(self, line_id: int) -> bool:
        return self.disabled.get(line_id, False)

    def mark_pending(self, line: IrqLine) -> int:
        """Record a held-back raise and return the new pending count."""
        if not self.is_disabled(line.id):
            raise ValueError(f"line {line.name} is enabled; nothing to hold back")
        if line.trigger == Trigger.LEVEL:
            self.pending[line.id] = 1
        else:
            self.pending[line.id] = self.pending.get(line.id, 0) + 1
        return self.pending[line.id]

    def take_pending(self, line_id: int) -> int:
        return self.pending.pop(line_id, 0)

    def count_execution(self, line_id: int) -> None:
        self.executed[line_id] += 1
