"""Batch episode evaluation on top of the engine's multi-world runner.

The engine already knows how to run K independent seeded worlds, order
the results, and fan out over processes; this wrapper only adapts policy
call conventions.  A policy handed to ``VectorRunner.run`` may be

  * an engine builtin name ("straight", "dive-turn", "random", "bt") or
    a "module:callable" path — passed straight through,
  * an engine policy ``fn(obs, world) -> PilotAction``,
  * or a plain array policy ``fn(obs) -> action array``, which gets
    wrapped so the engine sees PilotActions built by field name.

The wrapper itself holds no mutable state, so one instance can be
shared freely.
"""

import inspect
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from bvrsim import EpisodeSummary, PilotAction, ScenarioConfig, run_episodes


class ArrayPolicy:
    """obs -> action-array callable dressed up as an engine policy.

    Picklable whenever the wrapped callable is, which is what the
    engine's worker pool needs for workers > 1.
    """

    def __init__(self, fn: Callable, names: Sequence[str]):
        self.fn = fn
        self.names = tuple(names)

    def __call__(self, obs, world) -> PilotAction:
        a = np.asarray(self.fn(np.asarray(obs, dtype=np.float64)),
                       dtype=np.float64).reshape(-1)
        if a.size != len(self.names):
            raise ValueError(f"policy returned {a.size} values, "
                             f"expected {len(self.names)}")
        kwargs = {}
        for name, value in zip(self.names, a):
            kwargs[name] = bool(value >= 0.5) if name == "launch" else float(value)
        return PilotAction(**kwargs)


class VectorRunner:
    """Run batches of independent episodes through the engine's runner."""

    def __init__(self, config: ScenarioConfig, workers: int = 1):
        from bvrsim.scenarios import action_spec
        self.config = config
        self.workers = int(workers)
        self.action_names = tuple(action_spec(config)["names"])

    def run(self, policy: Union[str, Callable], seeds: Sequence[int],
            out_dir: Optional[str] = None) -> List[EpisodeSummary]:
        return run_episodes(self._adapt(policy), self.config, seeds,
                            workers=self.workers, out_dir=out_dir)

    def mean_reward(self, policy: Union[str, Callable],
                    seeds: Sequence[int]) -> float:
        """Mean terminal reward; for evade scenarios this is mean MD [km]."""
        results = self.run(policy, seeds)
        return float(np.mean([r.reward for r in results]))

    def _adapt(self, policy: Union[str, Callable]) -> Union[str, Callable]:
        if isinstance(policy, str):
            return policy
        if not callable(policy):
            raise TypeError(f"policy must be a name or callable, got {policy!r}")
        if _wants_world(policy):
            return policy
        return ArrayPolicy(policy, self.action_names)


def _wants_world(fn: Callable) -> bool:
    # Engine policies take (obs, world); array policies take (obs).
    try:
        params = list(inspect.signature(fn).parameters.values())
    except (TypeError, ValueError):
        return True
    if any(p.kind is p.VAR_POSITIONAL for p in params):
        return True
    positional = [p for p in params
                  if p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD)]
    return len(positional) >= 2
