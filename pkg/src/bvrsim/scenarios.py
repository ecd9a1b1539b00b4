"""Scenario logic: initial conditions, observations, actions, rewards.

Three scenarios:

    evade1   - survive one incoming missile; reward = miss distance [km]
    evade2   - survive two; reward = min of the two miss distances [km]
    dogfight - 1v1 vs the behavior-tree opponent; terminal reward +/-1

Observation layouts (raw SI units, angles in radians wrapped to (-pi, pi]):

    evade1   (h, v_D, v, psi, nu, tau, eta, beta, rho)                [9]
    evade2   (h, v_D, v, psi) + (nu, tau, eta, beta, rho) per missile [14]
    dogfight (rho_BR, nu_BR, v_B, h_B, psi_B, v_R, h_R,
              rho_BM0, nu_BM0, v_M0, h_M0)                            [11]

The evader never sees a live missile state: eta/beta/rho describe the
*launch point*, nu the launch speed, tau the time since launch.  In the
dogfight the missile block likewise carries launch-point data for the
oldest incoming missile, and duplicates the opponent block while no
missile is inbound (the threat "sits on the rail").
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .airframe import AircraftState, AutopilotSetpoints
from .config import ScenarioConfig
from .geom import bearing_to, distance3, wrap_pi

# Fixed scales for the normalized observation form.
ALT_SCALE = 20000.0     # m
SPEED_SCALE = 600.0     # m/s
DIST_SCALE = 100000.0   # m
TIME_SCALE = 300.0      # s


@dataclass(slots=True)
class PilotAction:
    """Agent command at the autopilot abstraction level.

    heading_deg in [0, 360) (values outside are wrapped); altitude_m is
    clamped to [0, ceiling]; throttle is ignored when the config fixes it;
    launch is honored only in dogfight with auto-launch disabled.
    """
    heading_deg: float
    altitude_m: float
    throttle: Optional[float] = None
    launch: bool = False


def decode_action(action: PilotAction, config: ScenarioConfig
                  ) -> Tuple[AutopilotSetpoints, bool, bool]:
    """Map a PilotAction to setpoints; returns (setpoints, launch, clamped)."""
    clamped = False
    heading = math.radians(action.heading_deg % 360.0)
    ceiling = config.aircraft.alt_ceiling
    alt = action.altitude_m
    if alt < 0.0 or alt > ceiling:
        alt = min(max(alt, 0.0), ceiling)
        clamped = True
    if config.fixed_throttle or action.throttle is None:
        throttle = config.throttle_default
    else:
        throttle = action.throttle
        if throttle < 0.0 or throttle > 1.0:
            throttle = min(max(throttle, 0.0), 1.0)
            clamped = True
    launch = bool(action.launch) and not config.auto_launch
    return AutopilotSetpoints(heading, alt, throttle), launch, clamped


@dataclass
class InitialConditions:
    blue: AircraftState
    shooters: List[AircraftState]   # evade: missile carriers; dogfight: [red]


def sample_initial_conditions(rng: np.random.Generator,
                              config: ScenarioConfig) -> InitialConditions:
    """Draw a start state.  Draw order is fixed and part of the replay
    contract: agent (speed, altitude, heading), then per threat
    (speed, altitude, distance, bearing).  Dogfight draws nothing — the
    start is a fixed symmetric head-on setup.
    """
    if config.scenario == "dogfight":
        alt = config.dogfight_alt
        v = config.dogfight_speed
        sep = config.dogfight_separation
        blue = AircraftState(n=0.0, e=0.0, d=-alt, v=v, psi=0.0, climb=0.0,
                             bank=0.0, throttle=config.throttle_default,
                             missiles=config.missile_loadout)
        red = AircraftState(n=sep, e=0.0, d=-alt, v=v, psi=math.pi, climb=0.0,
                            bank=0.0, throttle=1.0,
                            missiles=config.missile_loadout)
        return InitialConditions(blue=blue, shooters=[red])

    v = rng.uniform(*config.agent_speed_range)
    alt = rng.uniform(*config.agent_alt_range)
    heading = math.radians(rng.uniform(*config.agent_heading_range_deg))
    blue = AircraftState(n=0.0, e=0.0, d=-alt, v=v, psi=heading, climb=0.0,
                         bank=0.0, throttle=config.throttle_default, missiles=0)

    n_threats = 2 if config.scenario == "evade2" else 1
    shooters = []
    for _ in range(n_threats):
        sv = rng.uniform(*config.threat_speed_range)
        salt = rng.uniform(*config.threat_alt_range)
        dist = rng.uniform(*config.firing_distance_range)
        brg = math.radians(rng.uniform(0.0, 360.0))
        shooters.append(AircraftState(
            n=dist * math.cos(brg), e=dist * math.sin(brg), d=-salt,
            v=sv, psi=(brg + math.pi) % (2.0 * math.pi),  # nose at the agent
            climb=0.0, bank=0.0, throttle=1.0, missiles=1))
    return InitialConditions(blue=blue, shooters=shooters)


# ---------------------------------------------------------------------------
# Observations

def _launch_block(blue: AircraftState, missile) -> Tuple[float, ...]:
    """(nu, tau, eta, beta, rho) relative to a missile's launch point."""
    lp = missile.launch_position
    dn, de = lp[0] - blue.n, lp[1] - blue.e
    if dn == 0.0 and de == 0.0:
        eta = 0.0   # directly above/below: bearing undefined, 0 by convention
    else:
        eta = wrap_pi(math.atan2(de, dn) - blue.psi)
    rho = distance3(blue.position, lp)
    return (missile.nu, missile.tau, eta, missile.launch_altitude, rho)


def build_observation(world) -> List[float]:
    """Raw observation vector for the world's scenario."""
    blue = world.blue
    scenario = world.config.scenario
    if scenario in ("evade1", "evade2"):
        base = [blue.altitude, -blue.climb, blue.v, wrap_pi(blue.psi)]
        for m in world.missiles:
            base.extend(_launch_block(blue, m))
        return base

    red = world.red
    rho_br = distance3(blue.position, red.position)
    if red.n == blue.n and red.e == blue.e:
        nu_br = 0.0
    else:
        nu_br = wrap_pi(bearing_to(blue.n, blue.e, red.n, red.e) - blue.psi)
    obs = [rho_br, nu_br, blue.v, blue.altitude, wrap_pi(blue.psi),
           red.v, red.altitude]
    m0 = None
    for m in world.missiles:
        if m.target_id == "blue" and m.active:
            m0 = m
            break
    if m0 is None:
        # No inbound missile: the block mirrors the opponent itself.
        obs.extend([rho_br, nu_br, red.v, red.altitude])
    else:
        nu, _tau, eta, beta, rho = _launch_block(blue, m0)
        obs.extend([rho, eta, nu, beta])
    return obs


_EVADE_BASE = [("h", "alt"), ("v_D", "speed"), ("v", "speed"), ("psi", "angle")]
_LAUNCH_KINDS = [("nu", "speed"), ("tau", "time"), ("eta", "angle"),
                 ("beta", "alt"), ("rho", "dist")]


def _obs_schema(scenario: str) -> List[Tuple[str, str]]:
    if scenario == "evade1":
        return _EVADE_BASE + [(f"{n}_m1", k) for n, k in _LAUNCH_KINDS]
    if scenario == "evade2":
        return (_EVADE_BASE
                + [(f"{n}_m1", k) for n, k in _LAUNCH_KINDS]
                + [(f"{n}_m2", k) for n, k in _LAUNCH_KINDS])
    return [("rho_br", "dist"), ("nu_br", "angle"), ("v_b", "speed"),
            ("h_b", "alt"), ("psi_b", "angle"), ("v_r", "speed"),
            ("h_r", "alt"), ("rho_bm0", "dist"), ("nu_bm0", "angle"),
            ("v_m0", "speed"), ("h_m0", "alt")]


_KIND_SCALE = {"alt": ALT_SCALE, "speed": SPEED_SCALE, "dist": DIST_SCALE,
               "angle": math.pi, "time": TIME_SCALE}
_KIND_RANGE = {"alt": (0.0, 32000.0), "speed": (-600.0, 1500.0),
               "dist": (0.0, 500000.0), "angle": (-math.pi, math.pi),
               "time": (0.0, 2000.0)}


def normalize_observation(raw: List[float], scenario: str) -> List[float]:
    schema = _obs_schema(scenario)
    if len(raw) != len(schema):
        raise ValueError(f"observation length {len(raw)} != schema {len(schema)}")
    return [value / _KIND_SCALE[kind] for value, (_n, kind) in zip(raw, schema)]


def observation_spec(config: ScenarioConfig) -> dict:
    """Machine-readable observation description (names, bounds, shape)."""
    schema = _obs_schema(config.scenario)
    if config.normalized_obs:
        low = [_KIND_RANGE[k][0] / _KIND_SCALE[k] for _n, k in schema]
        high = [_KIND_RANGE[k][1] / _KIND_SCALE[k] for _n, k in schema]
    else:
        low = [_KIND_RANGE[k][0] for _n, k in schema]
        high = [_KIND_RANGE[k][1] for _n, k in schema]
    return {
        "scenario": config.scenario,
        "shape": (len(schema),),
        "names": [n for n, _k in schema],
        "low": low,
        "high": high,
        "normalized": config.normalized_obs,
    }


def action_spec(config: ScenarioConfig) -> dict:
    """Machine-readable action description matching `decode_action`."""
    names = ["heading_deg", "altitude_m"]
    low = [0.0, 0.0]
    high = [360.0, config.aircraft.alt_ceiling]
    if not config.fixed_throttle:
        names.append("throttle")
        low.append(0.0)
        high.append(1.0)
    if config.scenario == "dogfight" and not config.auto_launch:
        names.append("launch")
        low.append(0.0)
        high.append(1.0)
    return {"names": names, "low": low, "high": high, "shape": (len(names),)}


# ---------------------------------------------------------------------------
# Rewards

def _require_terminal(world):
    if world.terminal_cause is None:
        raise ValueError("reward queried before episode end")


def terminal_reward_evade1(world) -> float:
    """Miss distance in km; 0 on hit (or on flying into the ground)."""
    _require_terminal(world)
    if not world.blue.alive:
        return 0.0
    return world.missiles[0].md / 1000.0


def terminal_reward_evade2(world) -> float:
    """min(MD_M1, MD_M2) in km; a hit zeroes its own MD, hence the min."""
    _require_terminal(world)
    if not world.blue.alive:
        return 0.0
    return min(world.missiles[0].md, world.missiles[1].md) / 1000.0


def reward_dogfight(world) -> float:
    _require_terminal(world)
    if world.terminal_cause == "red_destroyed":
        return 1.0
    return -1.0


def terminal_reward(world) -> float:
    scenario = world.config.scenario
    if scenario == "evade1":
        return terminal_reward_evade1(world)
    if scenario == "evade2":
        return terminal_reward_evade2(world)
    return reward_dogfight(world)


# ---------------------------------------------------------------------------
# Weapons employment

def auto_launch_check(shooter: AircraftState, opponent: AircraftState,
                      config: ScenarioConfig) -> bool:
    """True when a launch is allowed: armed, in range, nose on target."""
    if shooter.missiles < 1 or not shooter.alive or not opponent.alive:
        return False
    rng = math.hypot(opponent.n - shooter.n, opponent.e - shooter.e)
    if rng >= config.launch_envelope:
        return False
    brg = bearing_to(shooter.n, shooter.e, opponent.n, opponent.e)
    return abs(wrap_pi(brg - shooter.psi)) < math.radians(config.align_gate_deg)
