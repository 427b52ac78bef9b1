# Steps and task types first; the machine imports them
from irqsim.kernel.tasks import (
    IDLE_PRIORITY, Call, Compute, HardMask, IoTrigger, Release, Resume, Semaphore, Sleep,
    SoftDisable, SoftEnable, Task, TaskState, Wait
)
from irqsim.kernel.scheduler import Kernel

__all__ = [
    'IDLE_PRIORITY', 'Call', 'Compute', 'HardMask', 'IoTrigger', 'Release', 'Resume', 'Semaphore', 'Sleep',
    'SoftDisable', 'SoftEnable', 'Task', 'TaskState', 'Wait', 'Kernel',
]
