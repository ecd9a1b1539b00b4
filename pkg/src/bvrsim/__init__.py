"""Beyond-visual-range air combat simulation.

Deterministic episode engine for missile-evasion and 1v1 engagement
scenarios: point-mass aircraft under an autopilot command abstraction,
proportional-navigation missiles, and a behavior-tree opponent.
"""

__version__ = "1.0.0"

from .config import (ScenarioConfig, config_from_dict, config_to_dict,
                     load_config, save_config)
from .engine import (EpisodeLog, EpisodeSummary, LogVersionError,
                     ReplayReport, World, replay_log, run_episode,
                     run_episodes)
from .scenarios import PilotAction

__all__ = [
    "ScenarioConfig",
    "PilotAction",
    "World",
    "EpisodeLog",
    "EpisodeSummary",
    "LogVersionError",
    "ReplayReport",
    "config_from_dict",
    "config_to_dict",
    "load_config",
    "save_config",
    "run_episode",
    "run_episodes",
    "replay_log",
    "__version__",
]
