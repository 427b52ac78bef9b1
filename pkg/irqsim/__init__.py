"""
irqsim - Deterministic simulator of interrupt dispatch and priority scheduling
"""
__version__ = "0.1.0"

from irqsim.core import Engine, EventKind, Rng, TraceLog, sample
from irqsim.machine import (
    GuestDelivery,
    GuestPendingMark,
    IrqLine,
    IsrActivation,
    Machine,
    Route,
    Trigger,
)
from irqsim.kernel import Kernel, Semaphore, Task, TaskState
from irqsim.harness import RawRun, TestRig, run_scenario, run_scenario_file, setup
from irqsim.models import (
    ArchConfig,
    CostModel,
    LatencySample,
    LoadSpec,
    MeasureConfig,
    ReportConfig,
    RunReport,
    ScenarioFile,
    Summary,
    Histogram,
    parse_scenario,
    render_scenario,
    constant,
    uniform,
    shifted_exponential,
)
from irqsim.stats import build_report, histogram, render_table, summarize
from irqsim.exceptions import (
    IrqSimException,
    PastDue,
    TimeOverflow,
    BadDistribution,
    UnknownLine,
    NoHandler,
    ArchMismatch,
    GuestContextError,
    MaskNestingError,
    UnknownSemaphore,
    SchedulerError,
    ConfigError,
    EmptyInput,
    BadWidth,
    ScenarioError,
    ParseError,
    UnknownKey,
    BadUnit,
    BadValue,
)

__all__ = [
    'Engine',
    'EventKind',
    'Rng',
    'TraceLog',
    'sample',
    'GuestDelivery',
    'GuestPendingMark',
    'IrqLine',
    'IsrActivation',
    'Machine',
    'Route',
    'Trigger',
    'Kernel',
    'Semaphore',
    'Task',
    'TaskState',
    'RawRun',
    'TestRig',
    'run_scenario',
    'run_scenario_file',
    'setup',
    'ArchConfig',
    'CostModel',
    'LatencySample',
    'LoadSpec',
    'MeasureConfig',
    'ReportConfig',
    'RunReport',
    'ScenarioFile',
    'Summary',
    'Histogram',
    'parse_scenario',
    'render_scenario',
    'constant',
    'uniform',
    'shifted_exponential',
    'build_report',
    'histogram',
    'render_table',
    'summarize',
    'IrqSimException',
    'PastDue',
    'TimeOverflow',
    'BadDistribution',
    'UnknownLine',
    'NoHandler',
    'ArchMismatch',
    'GuestContextError',
    'MaskNestingError',
    'UnknownSemaphore',
    'SchedulerError',
    'ConfigError',
    'EmptyInput',
    'BadWidth',
    'ScenarioError',
    'ParseError',
    'UnknownKey',
    'BadUnit',
    'BadValue',
]
