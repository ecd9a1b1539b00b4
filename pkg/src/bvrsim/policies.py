"""Built-in pilot policies.

`straight` and `dive-turn` are the scripted evasion references: the first
holds the initial track, the second dives for dense air and then turns
tail to the threat — dropping altitude forces the incoming missile to
fight drag where it hurts most, and the turn maximizes closing time.
`random` samples setpoints from the episode's policy RNG stream.  `bt`
drives blue with the same behavior tree the red adversary uses.
External policies load as "package.module:callable".
"""

import importlib
import math
from typing import Callable, Optional

from .behavior_tree import Blackboard, red_policy_tick
from .config import ScenarioConfig
from .geom import bearing_to, distance3
from .scenarios import PilotAction

# dive-turn shape: beeline descent first, then the away turn
DIVE_ALT = 1200.0      # m
TURN_DELAY_S = 6.0     # s between the dive command and the heading sweep


def make(name: str, config: ScenarioConfig) -> Callable:
    """Resolve a policy name to a fresh per-episode callable."""
    key = name.replace("_", "-").lower()
    if key == "straight":
        return _straight()
    if key == "dive-turn":
        return _dive_turn()
    if key == "random":
        return _random(config)
    if key == "bt":
        return _bt(config)
    if ":" in name:
        mod, _, attr = name.partition(":")
        fn = getattr(importlib.import_module(mod), attr)
        return fn() if isinstance(fn, type) else fn
    raise ValueError(f"unknown policy {name!r}")


def builtin_names():
    return ("straight", "dive-turn", "random", "bt")


def _straight() -> Callable:
    held: dict = {}

    def policy(obs, world) -> PilotAction:
        if not held:
            held["hd"] = math.degrees(world.blue.psi)
            held["alt"] = world.blue.altitude
        return PilotAction(held["hd"], held["alt"])

    return policy


def _nearest_launch(world):
    blue = world.blue
    best = None
    best_rho = math.inf
    for m in world.missiles:
        if m.target_id != "blue":
            continue
        rho = distance3(blue.position, m.launch_position)
        if rho < best_rho:
            best_rho = rho
            best = m
    return best


def _dive_turn() -> Callable:
    start: dict = {}

    def policy(obs, world) -> PilotAction:
        blue = world.blue
        if not start:
            start["hd"] = math.degrees(blue.psi)
            start["t0"] = world.clock
        if world.clock - start["t0"] < TURN_DELAY_S:
            return PilotAction(start["hd"], DIVE_ALT)
        threat = _nearest_launch(world)
        if threat is None:
            return PilotAction(start["hd"], DIVE_ALT)
        away = bearing_to(blue.n, blue.e, threat.launch_n, threat.launch_e) + math.pi
        return PilotAction(math.degrees(away) % 360.0, DIVE_ALT)

    return policy


def _random(config: ScenarioConfig) -> Callable:
    def policy(obs, world) -> PilotAction:
        gen = world.rng_policy
        heading = gen.uniform(0.0, 360.0)
        alt = gen.uniform(500.0, 15000.0)
        throttle: Optional[float] = None
        if not config.fixed_throttle:
            throttle = gen.uniform(0.3, 1.0)
        return PilotAction(heading, alt, throttle)

    return policy


def _bt(config: ScenarioConfig) -> Callable:
    """Blue flown by the adversary tree (dogfight only)."""

    def policy(obs, world) -> PilotAction:
        if world.red is None:
            raise ValueError("bt policy needs an opponent (dogfight scenario)")
        blue, red = world.blue, world.red
        incoming = tuple((ev["t"], tuple(ev["pos"]))
                         for ev in world.launch_events if ev["side"] == "red")
        own_active = any(m.target_id == "red" and m.active for m in world.missiles)
        bb = Blackboard(
            own=blue,
            opponent_position=red.position,
            opponent_velocity=red.velocity,
            incoming_launches=incoming,
            time_now=world.clock,
            missiles_remaining=blue.missiles,
            own_missile_active=own_active,
            cfg=config.red,
            launch_envelope=config.launch_envelope,
            align_gate_deg=config.align_gate_deg,
        )
        sp, launch = red_policy_tick(bb)
        return PilotAction(math.degrees(sp.heading) % 360.0, sp.altitude,
                           sp.throttle, launch)

    return policy
