from irqsim.core.engine import Engine, Event, EventHandle, EventKind, time_add, time_sub
from irqsim.core.rng import Rng, sample
from irqsim.core.trace import TraceLog, TraceRecord

__all__ = [
    'Engine', 'Event', 'EventHandle', 'EventKind', 'time_add', 'time_sub',
    'Rng', 'sample', 'TraceLog', 'TraceRecord',
]
