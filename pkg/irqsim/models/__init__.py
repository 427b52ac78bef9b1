# Import distributions first as they have no dependencies
from irqsim.models.distributions import (
    ConstantDist, UniformDist, ShiftedExponentialDist, DistributionSpec,
    Duration, parse_duration, format_duration, constant, uniform, shifted_exponential
)

# Import scenario schema
from irqsim.models.scenario import (
    ScenarioFile, ArchConfig, CostModel, LoadSpec, NetStorm, SerialCopier,
    MeasureConfig, ReportConfig, parse_scenario, render_scenario
)

# Import result models
from irqsim.models.results import LatencySample, Summary, Histogram, RunReport

__all__ = [
    'ConstantDist', 'UniformDist', 'ShiftedExponentialDist', 'DistributionSpec',
    'Duration', 'parse_duration', 'format_duration', 'constant', 'uniform', 'shifted_exponential',
    'ScenarioFile', 'ArchConfig', 'CostModel', 'LoadSpec', 'NetStorm', 'SerialCopier',
    'MeasureConfig', 'ReportConfig', 'parse_scenario', 'render_scenario',
    'LatencySample', 'Summary', 'Histogram', 'RunReport',
]
