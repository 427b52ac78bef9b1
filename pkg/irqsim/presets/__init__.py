"""
Scenario presets shipped with the package.

The four core presets cover the direct and virtualized architectures on an
idle and a loaded system. The ``direct-pthreads-*`` pair adds a per-switch
wrapper overhead to the direct architecture. The ``direct-vxworks-*`` pair
runs the direct architecture with a heavier entry path and scheduler.
"""
from importlib import resources
from typing import List

from irqsim.exceptions import ConfigError
from irqsim.models.scenario import ScenarioFile, parse_scenario

CORE_PRESETS = ("direct-idle", "direct-loaded", "virtualized-idle", "virtualized-loaded")
PTHREADS_PRESETS = ("direct-pthreads-idle", "direct-pthreads-loaded")
VXWORKS_PRESETS = ("direct-vxworks-idle", "direct-vxworks-loaded")


def preset_names() -> List[str]:
    return sorted(
        entry.name[: -len(".json")]
        for entry in resources.files(__name__).iterdir()
        if entry.name.endswith(".json")
    )


def preset_text(name: str) -> str:
    """Raw JSON of preset ``name``.

    Raises:
        ConfigError: If there is no such preset
    """
    if name not in preset_names():
        raise ConfigError(f"unknown preset '{name}' (known: {', '.join(preset_names())})")
    return resources.files(__name__).joinpath(f"{name}.json").read_text(encoding="utf-8")


def load_preset(name: str) -> ScenarioFile:
    return parse_scenario(preset_text(name))
