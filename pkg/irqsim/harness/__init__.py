from irqsim.harness.rig import TIMER_LINE, TestRig, setup
from irqsim.harness.loads import NET_LINE, SERIAL_LINE, LoadGenerators, install_loads
from irqsim.harness.runner import RawRun, run_scenario, run_scenario_file

__all__ = [
    'TIMER_LINE', 'TestRig', 'setup',
    'NET_LINE', 'SERIAL_LINE', 'LoadGenerators', 'install_loads',
    'RawRun', 'run_scenario', 'run_scenario_file',
]
