"""Gym-style environment adapter over the native episode engine.

The adapter is deliberately thin.  Spaces are read from the engine's
machine-readable ``describe_spaces()`` and action arrays are mapped onto
the engine's own ``PilotAction`` by field name, so no dynamics, reward,
or termination logic lives on this side.  One ``BvrEnv`` wraps exactly
one engine ``World`` and keeps its strict sequential-episode semantics:
``reset(seed)`` returns the first observation, ``step(action)`` returns
the classic ``(observation, reward, done, info)`` tuple.
"""

from typing import Optional

import numpy as np

from bvrsim import PilotAction, ScenarioConfig, World


class SpaceSpec:
    """Box-like space built from an engine space dict (names, low, high)."""

    def __init__(self, names, low, high):
        self.names = tuple(names)
        self.low = np.asarray(low, dtype=np.float64)
        self.high = np.asarray(high, dtype=np.float64)
        if self.low.shape != self.high.shape or len(self.names) != self.low.size:
            raise ValueError("inconsistent space description")
        self.shape = self.low.shape

    @classmethod
    def from_dict(cls, spec: dict) -> "SpaceSpec":
        return cls(spec["names"], spec["low"], spec["high"])

    @property
    def size(self) -> int:
        return int(self.low.size)

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return x.shape == self.shape and bool(
            np.all(x >= self.low) and np.all(x <= self.high))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.low, self.high)

    def __repr__(self):
        return f"SpaceSpec({list(self.names)})"


class BvrEnv:
    """reset/step/close protocol around one engine World."""

    def __init__(self, config: ScenarioConfig, seed: Optional[int] = None,
                 record: bool = False):
        self._world = World(config, record=record)
        self._seed = seed
        spaces = self._world.describe_spaces()
        self.observation_space = SpaceSpec.from_dict(spaces["observation"])
        self.action_space = SpaceSpec.from_dict(spaces["action"])

    @property
    def config(self) -> ScenarioConfig:
        return self._world.config

    @property
    def done(self) -> bool:
        return self._world.done

    def reset(self, seed: Optional[int] = None) -> np.ndarray:
        if seed is None:
            seed = self._seed
        if seed is None:
            raise ValueError("no seed: pass reset(seed=...) or construct with one")
        self._seed = int(seed)
        return np.asarray(self._world.reset(self._seed), dtype=np.float64)

    def step(self, action):
        tr = self._world.step(self._pilot_action(action))
        obs = np.asarray(tr.observation, dtype=np.float64)
        return obs, tr.reward, tr.done, tr.info

    def close(self) -> None:
        pass

    def episode_log(self):
        """Engine episode log (requires record=True and a finished episode)."""
        return self._world.episode_log()

    def _pilot_action(self, action) -> PilotAction:
        if isinstance(action, PilotAction):
            return action
        a = np.asarray(action, dtype=np.float64).reshape(-1)
        if a.shape != self.action_space.shape:
            raise ValueError(
                f"action shape {a.shape} != {self.action_space.shape} "
                f"({list(self.action_space.names)})")
        kwargs = {}
        for name, value in zip(self.action_space.names, a):
            # launch is the only non-float field; >= 0.5 means "fire"
            kwargs[name] = bool(value >= 0.5) if name == "launch" else float(value)
        return PilotAction(**kwargs)


def make_env(scenario: str, seed: Optional[int] = None, *,
             record: bool = False, config: Optional[ScenarioConfig] = None,
             **overrides) -> BvrEnv:
    """Env for a scenario name with engine-config overrides.

    Overrides are ScenarioConfig fields, e.g. ``normalized_obs=True`` or
    ``fixed_throttle=False`` (the latter grows the action vector by a
    throttle component).  Passing a ready ``config`` skips construction;
    it cannot be combined with overrides.
    """
    if config is not None:
        if overrides:
            raise ValueError("pass either config= or field overrides, not both")
        if config.scenario != scenario:
            raise ValueError(
                f"config is for {config.scenario!r}, requested {scenario!r}")
        return BvrEnv(config, seed=seed, record=record)
    return BvrEnv(ScenarioConfig.for_scenario(scenario, **overrides),
                  seed=seed, record=record)
