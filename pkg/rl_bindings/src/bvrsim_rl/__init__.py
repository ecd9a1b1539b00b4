"""RL bindings for the bvrsim air-combat engine.

`make_env` wraps one engine world behind the classic reset/step/close
protocol with spaces read from the engine's machine-readable space
descriptions; `VectorRunner` batches whole episodes through the
engine's multi-world runner; `example_train` is a smoke-scale PPO
training entry point.
"""

__version__ = "1.0.0"

from .env import BvrEnv, SpaceSpec, make_env
from .ppo import ActorCritic, PPOParams, PPOTrainer
from .train import TrainResult, evaluate_policy, example_train, load_policy
from .vector import ArrayPolicy, VectorRunner

__all__ = [
    "BvrEnv",
    "SpaceSpec",
    "make_env",
    "VectorRunner",
    "ArrayPolicy",
    "PPOParams",
    "PPOTrainer",
    "ActorCritic",
    "example_train",
    "evaluate_policy",
    "load_policy",
    "TrainResult",
    "__version__",
]
