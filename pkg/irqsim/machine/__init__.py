from irqsim.machine.irq import (
    GuestDelivery, GuestPendingMark, IrqLine, IsrActivation, Route, SoftMaskState, Trigger
)
from irqsim.machine.segment import Segment
from irqsim.machine.machine import Machine, MaskGuard

__all__ = [
    'GuestDelivery', 'GuestPendingMark', 'IrqLine', 'IsrActivation', 'Route', 'SoftMaskState', 'Trigger',
    'Segment', 'Machine', 'MaskGuard',
]
