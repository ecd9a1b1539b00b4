"""Run configuration: tunables with documented defaults and INI round-trip.

`ScenarioConfig.for_scenario(name)` is the normal entry point; it applies
the per-scenario decision cadence and launch handling.  All values are SI
unless a field name carries an explicit unit suffix.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from typing import Tuple

SCENARIOS = ("evade1", "evade2", "dogfight")


@dataclass
class AircraftConfig:
    # Point-mass airframe, loosely a mid-weight multirole fighter.
    mass: float = 9000.0              # kg
    wing_area: float = 27.87          # m^2
    cd0: float = 0.022                # zero-lift drag coefficient
    induced_k: float = 0.14           # induced drag factor, CD = cd0 + k*CL^2
    cl_max: float = 1.2
    # Installed thrust scales with (rho/rho0)^0.7 and throttle^3; the cubic
    # keeps part-throttle cruise realistic while full throttle reaches the
    # advertised top speed (~Mach 1.8 level at 10 km).
    thrust_max: float = 80144.0       # N, sea-level static at full throttle
    thrust_lapse_exp: float = 0.7

    # Autopilot (outer-loop) gains and limits.
    max_bank_deg: float = 75.0
    bank_rate_limit_deg: float = 120.0   # deg/s
    kp_heading: float = 4.0              # bank cmd [rad] per heading error [rad]
    kp_alt: float = 0.1                  # climb cmd [m/s] per altitude error [m]
    climb_max: float = 150.0             # m/s, autopilot climb/descent limit
    climb_tau: float = 2.0               # s, climb-rate response lag
    accel_z_max: float = 30.0            # m/s^2, vertical acceleration clamp
    v_floor: float = 80.0                # m/s, low-speed protection threshold
    alt_ceiling: float = 20000.0         # m, altitude command clamp


@dataclass
class MissileConfig:
    mass: float = 160.0               # kg, held constant over the flight
    boost_time: float = 10.0          # s
    boost_accel: float = 100.0        # m/s^2 axial thrust acceleration
    cda: float = 0.0075               # m^2 drag area (Cd * reference area)
    cruise_alt: float = 12000.0       # m, midcourse loft altitude
    climb_angle_deg: float = 25.0     # boost/ascent climb angle
    activation_range: float = 20000.0  # m, guidance turns on inside this range
    activation_alt_band: float = 500.0  # m, ...or once this close to cruise alt
    nav_gain: float = 4.0             # proportional navigation constant
    accel_limit_g: float = 40.0       # lateral acceleration clamp
    r_hit: float = 100.0              # m, kill radius
    give_up_time: float = 10.0        # s of continuously opening range -> Expired
    v_min: float = 150.0              # m/s, below this the missile is spent


@dataclass
class RedPolicyConfig:
    # Thresholds for the built-in behavior-tree opponent.
    threat_window: float = 120.0      # s a detected launch is treated as live
    evade_alt: float = 3000.0         # m, dive-to target altitude while evading
    crank_angle_deg: float = 40.0     # off-boresight offset while supporting
    approach_alt: float = 10000.0     # m


@dataclass
class ScenarioConfig:
    scenario: str = "evade1"
    physics_dt: float = 0.02          # s, fixed integration step (50 Hz)
    decision_interval: float = 1.0    # s between agent commands
    episode_cap_s: float = 960.0      # hard wall-clock cap (16 min)
    auto_launch: bool = False         # engine fires for blue when aligned/in range
    fixed_throttle: bool = True       # drop throttle from the action vector
    throttle_default: float = 1.0
    normalized_obs: bool = False      # scale observations to ~[-1, 1]

    # Initial-condition sampling ranges.
    agent_speed_range: Tuple[float, float] = (300.0, 365.0)    # m/s
    agent_alt_range: Tuple[float, float] = (6000.0, 10000.0)   # m
    agent_heading_range_deg: Tuple[float, float] = (0.0, 360.0)
    threat_speed_range: Tuple[float, float] = (280.0, 320.0)   # m/s, shooter
    threat_alt_range: Tuple[float, float] = (9000.0, 11000.0)  # m, shooter
    firing_distance_range: Tuple[float, float] = (40000.0, 80000.0)  # m

    # Weapon employment (shared by blue auto-launch and the red policy).
    launch_envelope: float = 50000.0  # m
    align_gate_deg: float = 10.0      # max bearing error to fire
    missile_loadout: int = 2          # per side, dogfight

    # Dogfight start is fixed and symmetric: both aircraft level, head-on.
    dogfight_separation: float = 60000.0  # m
    dogfight_alt: float = 10000.0         # m
    dogfight_speed: float = 300.0         # m/s

    aircraft: AircraftConfig = field(default_factory=AircraftConfig)
    missile: MissileConfig = field(default_factory=MissileConfig)
    red: RedPolicyConfig = field(default_factory=RedPolicyConfig)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}, expected one of {SCENARIOS}")
        if self.physics_dt <= 0.0:
            raise ValueError("physics_dt must be positive")
        n = self.decision_interval / self.physics_dt
        if abs(n - round(n)) > 1e-9 or round(n) < 1:
            raise ValueError("decision_interval must be a positive multiple of physics_dt")

    @property
    def ticks_per_decision(self) -> int:
        return int(round(self.decision_interval / self.physics_dt))

    @classmethod
    def for_scenario(cls, scenario: str, **overrides) -> "ScenarioConfig":
        """Config with per-scenario cadence/launch defaults applied."""
        base = {"scenario": scenario}
        if scenario == "dogfight":
            base["decision_interval"] = 10.0
            base["auto_launch"] = True
        base.update(overrides)
        return cls(**base)


_SECTIONS = {
    "scenario": ScenarioConfig,
    "aircraft": AircraftConfig,
    "missile": MissileConfig,
    "red_policy": RedPolicyConfig,
}
_NESTED = {"aircraft": "aircraft", "missile": "missile", "red_policy": "red"}


def config_to_dict(cfg: ScenarioConfig) -> dict:
    """Plain-JSON-able dict (tuples become lists)."""
    def jsonable(x):
        if isinstance(x, tuple):
            return [jsonable(v) for v in x]
        if isinstance(x, dict):
            return {k: jsonable(v) for k, v in x.items()}
        return x

    return jsonable(dataclasses.asdict(cfg))


def config_from_dict(data: dict) -> ScenarioConfig:
    """Inverse of config_to_dict."""
    data = dict(data)
    sub = {
        "aircraft": AircraftConfig(**data.pop("aircraft", {})),
        "missile": MissileConfig(**data.pop("missile", {})),
        "red": RedPolicyConfig(**data.pop("red", {})),
    }
    for key, value in list(data.items()):
        if isinstance(value, list):
            data[key] = tuple(value)
    return ScenarioConfig(**data, **sub)


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(repr(v) for v in value)
    if isinstance(value, str):
        return value          # INI values are bare text, not Python literals
    return repr(value)


def _parse_value(text: str, ftype) -> object:
    text = text.strip()
    origin = getattr(ftype, "__origin__", None)
    if ftype is float:
        return float(text)
    if ftype is int:
        return int(text)
    if ftype is bool:
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {text!r}")
    if ftype is str:
        return text
    if origin is tuple:
        parts = [p for p in text.split(",") if p.strip()]
        return tuple(float(p) for p in parts)
    raise TypeError(f"unsupported config field type: {ftype}")


def save_config(cfg: ScenarioConfig, path: str) -> None:
    """Write the full configuration as an INI file."""
    parser = configparser.ConfigParser()
    top = {}
    for f in dataclasses.fields(ScenarioConfig):
        if f.name in ("aircraft", "missile", "red"):
            continue
        top[f.name] = _format_value(getattr(cfg, f.name))
    parser["scenario"] = top
    for section, attr in _NESTED.items():
        sub = getattr(cfg, attr)
        parser[section] = {
            f.name: _format_value(getattr(sub, f.name)) for f in dataclasses.fields(sub)
        }
    with open(path, "w", encoding="utf-8") as fh:
        parser.write(fh)


def load_config(path: str, **overrides) -> ScenarioConfig:
    """Load an INI config; later keyword overrides win over file values.

    Unknown sections or keys raise, so typos fail loudly instead of being
    silently ignored.
    """
    parser = configparser.ConfigParser()
    with open(path, "r", encoding="utf-8") as fh:
        parser.read_file(fh)

    def section_kwargs(section: str, cls) -> dict:
        ftypes = {f.name: f.type for f in dataclasses.fields(cls)}
        # dataclass field types arrive as strings under `from __future__ import
        # annotations`; resolve the common ones by name.
        resolved = {}
        for name, ftype in ftypes.items():
            if isinstance(ftype, str):
                ftype = {"float": float, "int": int, "bool": bool, "str": str}.get(
                    ftype, Tuple[float, float] if ftype.startswith("Tuple") else ftype)
            resolved[name] = ftype
        kwargs = {}
        if not parser.has_section(section):
            return kwargs
        for key, raw in parser.items(section):
            if key not in resolved:
                raise KeyError(f"unknown config key [{section}] {key}")
            kwargs[key] = _parse_value(raw, resolved[key])
        return kwargs

    for section in parser.sections():
        if section not in _SECTIONS:
            raise KeyError(f"unknown config section [{section}]")

    top = section_kwargs("scenario", ScenarioConfig)
    top["aircraft"] = AircraftConfig(**section_kwargs("aircraft", AircraftConfig))
    top["missile"] = MissileConfig(**section_kwargs("missile", MissileConfig))
    top["red"] = RedPolicyConfig(**section_kwargs("red_policy", RedPolicyConfig))
    for key, value in overrides.items():
        top[key] = value
    return ScenarioConfig(**top)
