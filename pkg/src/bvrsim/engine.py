"""Episode engine: world stepping, Gym-like API, logging, replay.

One `World` is one strictly sequential episode.  All physics run at a
fixed 50 Hz tick; the agent acts every `decision_interval` seconds and
the setpoints are held in between.  Within one physics tick the update
order is fixed (determinism contract):

    1. pending blue launch (first tick of a decision interval only)
    2. red behavior-tree tick (dogfight, 1 Hz) and red launch
    3. aircraft integration (blue, then red) from pre-tick snapshots
    4. missile integration (creation order) against pre-tick snapshots
    5. hit / expiry resolution and casualty marking
    6. terminal-cause evaluation (exactly one cause, latched)
    7. tick record append (when recording)

Terminal causes: evade scenarios `hit`, `evaded`, `ground_impact`,
`timeout`; dogfight `blue_destroyed`, `red_destroyed`, `timeout`.  When
both aircraft die on the same tick the blue loss wins the tie-break.

Episode logs are JSON lines: one header object, one object per physics
tick, one footer object.  Tick record fields, in order: `k` (tick index,
0-based), `t` (clock after the tick, = (k+1)*dt), `action` (only on the
first tick of a decision interval: [heading_deg, altitude_m, throttle,
launch]), `blue` / `red` (unit state lists, see `_aircraft_record`),
`missiles` (map mid -> state list, see `_missile_record`), `cmd` (held
setpoints per side), `events` (launch/hit/expire/ground this tick).
Floats serialize via repr and round-trip exactly, so replaying a log's
header and actions through the same engine version reproduces every
record bit-for-bit.
"""

import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Sequence, Union

from . import rng as rng_mod
from .airframe import AircraftState, AutopilotSetpoints, autopilot, step_aircraft
from .behavior_tree import Blackboard, red_policy_tick
from .config import ScenarioConfig, config_from_dict, config_to_dict
from .missile import (EXPIRED, HIT, MissileState, check_terminal,
                      launch_missile, step_missile)
from .scenarios import (PilotAction, auto_launch_check, build_observation,
                        decode_action, normalize_observation, observation_spec,
                        action_spec, terminal_reward)

LOG_FORMAT = "bvrsim-log-v1"
RED_TICK_SECONDS = 1.0


class Transition(NamedTuple):
    observation: list
    reward: float
    done: bool
    info: dict


class LogVersionError(RuntimeError):
    """Log written by a different engine/RNG version; refuse to replay."""


@dataclass
class ReplayReport:
    identical: bool
    divergence_tick: Optional[int] = None
    detail: str = ""


@dataclass
class EpisodeLog:
    header: dict
    ticks: List[dict]
    footer: dict

    def dump(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for line in self.to_lines():
                fh.write(line + "\n")

    def to_lines(self) -> List[str]:
        out = [_dumps(self.header)]
        out.extend(_dumps(t) for t in self.ticks)
        out.append(_dumps(self.footer))
        return out

    @classmethod
    def load(cls, path: str) -> "EpisodeLog":
        with open(path, "r", encoding="utf-8") as fh:
            lines = [json.loads(line) for line in fh if line.strip()]
        if len(lines) < 2 or lines[0].get("format") != LOG_FORMAT \
                or not lines[-1].get("footer"):
            raise ValueError(f"not a {LOG_FORMAT} episode log: {path}")
        return cls(header=lines[0], ticks=lines[1:-1], footer=lines[-1])


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def _aircraft_record(a: AircraftState) -> list:
    return [a.n, a.e, a.d, a.v, a.psi, a.climb, a.bank, a.throttle,
            a.alive, a.missiles]


def _missile_record(m: MissileState) -> list:
    return [m.n, m.e, m.d, m.vn, m.ve, m.vd, m.phase, m.outcome,
            m.tau, m.burn, m.md]


def _sp_record(sp: Optional[AutopilotSetpoints]) -> Optional[list]:
    return None if sp is None else [sp.heading, sp.altitude, sp.throttle]


class World:
    """One episode: reset(seed) -> obs; step(action) -> Transition."""

    def __init__(self, config: ScenarioConfig, record: bool = False):
        self.config = config
        self.record = record
        self.dt = config.physics_dt
        self.blue: Optional[AircraftState] = None
        self.red: Optional[AircraftState] = None
        self.missiles: List[MissileState] = []
        self.ticks = 0
        self.terminal_cause: Optional[str] = None
        self.seed: Optional[int] = None
        self._red_period = int(round(RED_TICK_SECONDS / self.dt))
        self._records: List[dict] = []
        self._header: Optional[dict] = None
        self._rewards: List[float] = []
        self.shots = {"blue": 0, "red": 0}
        self.launch_events: List[dict] = []   # {"t","side","mid","pos"}
        self.rng_policy = None

    # -- lifecycle ---------------------------------------------------------

    def reset(self, seed: int) -> list:
        from .scenarios import sample_initial_conditions  # local: keeps import light

        cfg = self.config
        self.seed = int(seed)
        init_stream = rng_mod.make_stream(self.seed, "init")
        self.rng_policy = rng_mod.make_stream(self.seed, "policy")
        ic = sample_initial_conditions(init_stream, cfg)
        self.blue = ic.blue
        self.missiles = []
        self.ticks = 0
        self.terminal_cause = None
        self._records = []
        self._rewards = []
        self.shots = {"blue": 0, "red": 0}
        self.launch_events = []
        self._pending_action: Optional[PilotAction] = None
        self._pending_blue_fire = False
        self._clamped = False
        self._step_launches: List[str] = []

        if cfg.scenario == "dogfight":
            self.red = ic.shooters[0]
            self._red_sp = AutopilotSetpoints(self.red.psi, self.red.altitude, 1.0)
        else:
            self.red = None
            self._red_sp = None
            for i, shooter in enumerate(ic.shooters):
                m = launch_missile(shooter, "blue", cfg.missile,
                                   target=self.blue, mid=f"M{i + 1}")
                self.missiles.append(m)
                self._note_launch("threat", m)
        self._blue_sp = AutopilotSetpoints(self.blue.psi, self.blue.altitude,
                                           self.blue.throttle)
        if self.record:
            self._header = {
                "format": LOG_FORMAT,
                "version": _version(),
                "rng_scheme": rng_mod.SCHEME,
                "seed": self.seed,
                "config": config_to_dict(cfg),
            }
        return self._observe()

    @property
    def done(self) -> bool:
        return self.terminal_cause is not None

    @property
    def clock(self) -> float:
        return self.ticks * self.dt

    def describe_spaces(self) -> dict:
        return {"observation": observation_spec(self.config),
                "action": action_spec(self.config)}

    # -- stepping ----------------------------------------------------------

    def step(self, action: PilotAction) -> Transition:
        if self.blue is None:
            raise RuntimeError("reset() before step()")
        if self.done:
            raise RuntimeError("episode finished")
        cfg = self.config
        sp, manual_launch, clamped = decode_action(action, cfg)
        self._blue_sp = sp
        self._clamped = clamped
        self._step_launches = []

        fire_blue = False
        if cfg.scenario == "dogfight":
            if cfg.auto_launch:
                fire_blue = auto_launch_check(self.blue, self.red, cfg)
            else:
                fire_blue = manual_launch and self.blue.missiles > 0
        self._pending_action = action
        self._pending_blue_fire = fire_blue

        for _ in range(cfg.ticks_per_decision):
            self._tick()
            if self.done:
                break

        reward = terminal_reward(self) if self.done else 0.0
        self._rewards.append(reward)
        info = {
            "t": self.clock,
            "terminal_cause": self.terminal_cause,
            "md": {m.mid: m.md for m in self.missiles},
            "shots": dict(self.shots),
            "clamped": self._clamped,
            "launches": list(self._step_launches),
        }
        return Transition(self._observe(), reward, self.done, info)

    def _observe(self) -> list:
        raw = build_observation(self)
        if self.config.normalized_obs:
            return normalize_observation(raw, self.config.scenario)
        return raw

    def _note_launch(self, side: str, m: MissileState) -> None:
        self.launch_events.append({
            "t": self.clock, "side": side, "mid": m.mid,
            "pos": [m.launch_n, m.launch_e, m.launch_d]})
        if side in self.shots:
            self.shots[side] += 1
        self._step_launches.append(m.mid)

    def _tick(self) -> None:
        cfg = self.config
        dt = self.dt
        events: List[dict] = []

        # 1. pending blue launch at the decision instant
        if self._pending_blue_fire:
            self._pending_blue_fire = False
            m = launch_missile(self.blue, "red", cfg.missile, target=self.red,
                               mid=f"B{self.shots['blue']}")
            self.missiles.append(m)
            self._note_launch("blue", m)
            events.append({"event": "launch", "mid": m.mid, "shooter": "blue",
                           "pos": [m.launch_n, m.launch_e, m.launch_d]})

        # 2. red behavior tree at its own cadence
        if self.red is not None and self.red.alive \
                and self.ticks % self._red_period == 0:
            bb = self._red_blackboard()
            sp, fire = red_policy_tick(bb)
            self._red_sp = sp
            if fire and self.red.missiles > 0:
                m = launch_missile(self.red, "blue", cfg.missile,
                                   target=self.blue, mid=f"R{self.shots['red']}")
                self.missiles.append(m)
                self._note_launch("red", m)
                events.append({"event": "launch", "mid": m.mid, "shooter": "red",
                               "pos": [m.launch_n, m.launch_e, m.launch_d]})

        # 3. aircraft integration from pre-tick snapshots
        blue0 = self.blue
        red0 = self.red
        self.blue = step_aircraft(blue0, autopilot(blue0, self._blue_sp,
                                                   cfg.aircraft), cfg.aircraft, dt)
        if red0 is not None and red0.alive:
            self.red = step_aircraft(red0, autopilot(red0, self._red_sp,
                                                     cfg.aircraft), cfg.aircraft, dt)
        if not self.blue.alive and blue0.alive:
            events.append({"event": "ground", "unit": "blue"})
        if self.red is not None and red0.alive and not self.red.alive:
            events.append({"event": "ground", "unit": "red"})

        # 4./5. missiles against pre-tick target snapshots; any non-active
        # outcome after the update transitioned on this tick.
        blue_hit = False
        red_hit = False
        for i, m in enumerate(self.missiles):
            if not m.active:
                continue
            target0 = blue0 if m.target_id == "blue" else red0
            m = step_missile(m, target0, dt, cfg.missile)
            check_terminal(m, target0, cfg.missile)
            self.missiles[i] = m
            if m.outcome == HIT:
                events.append({"event": "hit", "mid": m.mid,
                               "target": m.target_id})
                if m.target_id == "blue":
                    blue_hit = True
                else:
                    red_hit = True
            elif m.outcome == EXPIRED:
                events.append({"event": "expire", "mid": m.mid, "md": m.md})

        if blue_hit:
            self.blue.alive = False
        if red_hit and self.red is not None:
            self.red.alive = False

        self.ticks += 1

        # 6. terminal causes, exactly one, latched
        if cfg.scenario == "dogfight":
            if not self.blue.alive:
                self.terminal_cause = "blue_destroyed"
            elif self.red is not None and not self.red.alive:
                self.terminal_cause = "red_destroyed"
            elif self.clock >= cfg.episode_cap_s:
                self.terminal_cause = "timeout"
        else:
            if any(m.outcome == HIT for m in self.missiles):
                self.terminal_cause = "hit"
            elif not self.blue.alive:
                self.terminal_cause = "ground_impact"
            elif all(not m.active for m in self.missiles):
                self.terminal_cause = "evaded"
            elif self.clock >= cfg.episode_cap_s:
                self.terminal_cause = "timeout"

        # 7. tick record
        if self.record:
            rec = {"k": self.ticks - 1, "t": self.clock}
            if self._pending_action is not None:
                a = self._pending_action
                rec["action"] = [a.heading_deg, a.altitude_m, a.throttle,
                                 bool(a.launch)]
                self._pending_action = None
            rec["blue"] = _aircraft_record(self.blue)
            rec["red"] = None if self.red is None else _aircraft_record(self.red)
            rec["missiles"] = {m.mid: _missile_record(m) for m in self.missiles}
            rec["cmd"] = {"blue": _sp_record(self._blue_sp),
                          "red": _sp_record(self._red_sp)}
            rec["events"] = events
            self._records.append(rec)
        elif self._pending_action is not None:
            self._pending_action = None

    def _red_blackboard(self) -> Blackboard:
        cfg = self.config
        incoming = tuple((ev["t"], tuple(ev["pos"]))
                         for ev in self.launch_events if ev["side"] == "blue")
        own_active = any(m.target_id == "blue" and m.active
                         and m.mid.startswith("R") for m in self.missiles)
        return Blackboard(
            own=self.red,
            opponent_position=self.blue.position,
            opponent_velocity=self.blue.velocity,
            incoming_launches=incoming,
            time_now=self.clock,
            missiles_remaining=self.red.missiles,
            own_missile_active=own_active,
            cfg=cfg.red,
            launch_envelope=cfg.launch_envelope,
            align_gate_deg=cfg.align_gate_deg,
        )

    # -- log assembly ------------------------------------------------------

    def episode_log(self) -> EpisodeLog:
        if not self.record:
            raise RuntimeError("world was not recording")
        if not self.done:
            raise RuntimeError("episode not finished")
        footer = {
            "footer": True,
            "terminal_cause": self.terminal_cause,
            "reward": self._rewards[-1] if self._rewards else 0.0,
            "total_reward": sum(self._rewards),
            "md": {m.mid: m.md for m in self.missiles},
            "outcomes": {m.mid: m.outcome for m in self.missiles},
            "shots": dict(self.shots),
            "ticks": self.ticks,
            "duration_s": self.clock,
        }
        return EpisodeLog(header=self._header, ticks=self._records, footer=footer)


def _version() -> str:
    from . import __version__
    return __version__


# ---------------------------------------------------------------------------
# Episode running

PolicyFn = Callable[[list, World], PilotAction]


def run_episode(policy: Union[str, PolicyFn], config: ScenarioConfig,
                seed: int, record: bool = True) -> EpisodeLog:
    """Run one full episode under a policy; returns the complete log."""
    from . import policies
    fn = policies.make(policy, config) if isinstance(policy, str) else policy
    world = World(config, record=record)
    obs = world.reset(seed)
    while not world.done:
        obs, _reward, _done, _info = world.step(fn(obs, world))
    return world.episode_log() if record else None


@dataclass
class EpisodeSummary:
    seed: int
    scenario: str
    reward: float
    terminal_cause: str
    duration_s: float
    ticks: int
    md: dict = field(default_factory=dict)
    shots: dict = field(default_factory=dict)
    log_path: Optional[str] = None


def _summarize(log: EpisodeLog, seed: int, scenario: str,
               path: Optional[str]) -> EpisodeSummary:
    f = log.footer
    return EpisodeSummary(seed=seed, scenario=scenario, reward=f["reward"],
                          terminal_cause=f["terminal_cause"],
                          duration_s=f["duration_s"], ticks=f["ticks"],
                          md=f["md"], shots=f["shots"], log_path=path)


def _run_one(args) -> EpisodeSummary:
    policy, config_dict, seed, out_dir = args
    config = config_from_dict(config_dict)
    log = run_episode(policy, config, seed, record=True)
    path = None
    if out_dir is not None:
        path = os.path.join(out_dir, f"ep_{seed:06d}.jsonl")
        log.dump(path)
    return _summarize(log, seed, config.scenario, path)


def run_episodes(policy: Union[str, PolicyFn], config: ScenarioConfig,
                 seeds: Sequence[int], workers: int = 1,
                 out_dir: Optional[str] = None) -> List[EpisodeSummary]:
    """Run many independent episodes, optionally in parallel workers.

    Results are ordered by position in `seeds` regardless of worker
    scheduling.  With workers > 1 the policy must be a built-in name or a
    picklable callable.
    """
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
    jobs = [(policy, config_to_dict(config), int(s), out_dir) for s in seeds]
    if workers <= 1 or len(jobs) <= 1:
        return [_run_one(j) for j in jobs]
    import multiprocessing as mp
    with mp.Pool(processes=workers) as pool:
        return pool.map(_run_one, jobs)


# ---------------------------------------------------------------------------
# Replay

def replay_log(log: EpisodeLog) -> ReplayReport:
    """Re-simulate a log and compare every tick record.

    Raises LogVersionError when the log was produced by a different
    engine version or RNG scheme; otherwise reports the first diverging
    tick (or identical).
    """
    h = log.header
    if h.get("format") != LOG_FORMAT:
        raise LogVersionError(f"unknown log format {h.get('format')!r}")
    if h.get("version") != _version():
        raise LogVersionError(
            f"log version {h.get('version')!r} != engine {_version()!r}")
    if h.get("rng_scheme") != rng_mod.SCHEME:
        raise LogVersionError(
            f"log rng scheme {h.get('rng_scheme')!r} != {rng_mod.SCHEME!r}")

    config = config_from_dict(h["config"])
    world = World(config, record=True)
    world.reset(h["seed"])
    for rec in log.ticks:
        if "action" in rec and not world.done:
            hd, alt, thr, launch = rec["action"]
            world.step(PilotAction(hd, alt, thr, bool(launch)))

    new_ticks = world._records
    for i, (a, b) in enumerate(zip(log.ticks, new_ticks)):
        if a != b:
            return ReplayReport(False, a.get("k", i), _first_diff(a, b))
    if len(new_ticks) != len(log.ticks):
        k = min(len(new_ticks), len(log.ticks))
        return ReplayReport(False, k, "tick count differs: "
                            f"log {len(log.ticks)}, replay {len(new_ticks)}")
    if not world.done:
        return ReplayReport(False, len(log.ticks) - 1,
                            "log ended before replay reached a terminal state")
    return ReplayReport(True)


def _first_diff(a: dict, b: dict, prefix: str = "") -> str:
    for key in a.keys() | b.keys():
        va, vb = a.get(key), b.get(key)
        if va == vb:
            continue
        if isinstance(va, dict) and isinstance(vb, dict):
            return _first_diff(va, vb, prefix=f"{prefix}{key}.")
        return f"field {prefix}{key}: {va!r} != {vb!r}"
    return "records differ"
