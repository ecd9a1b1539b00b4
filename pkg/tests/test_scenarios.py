"""Initial conditions, observation layout, rewards, launch gating."""

import math
from types import SimpleNamespace

import numpy as np
import pytest

from bvrsim.airframe import AircraftState
from bvrsim.config import ScenarioConfig
from bvrsim.scenarios import (PilotAction, auto_launch_check,
                              build_observation, decode_action,
                              normalize_observation, observation_spec,
                              action_spec, sample_initial_conditions,
                              terminal_reward, terminal_reward_evade1,
                              terminal_reward_evade2, reward_dogfight)


def plane(n=0.0, e=0.0, alt=8000.0, v=300.0, psi=0.0, climb=0.0, missiles=0,
          alive=True):
    return AircraftState(n=n, e=e, d=-alt, v=v, psi=psi, climb=climb,
                         bank=0.0, throttle=1.0, alive=alive,
                         missiles=missiles)


def fake_missile(launch=(0.0, 0.0, -10000.0), nu=300.0, tau=5.0, md=1e9,
                 target_id="blue", active=True):
    return SimpleNamespace(launch_position=launch, launch_altitude=-launch[2],
                           nu=nu, tau=tau, md=md, target_id=target_id,
                           active=active)


def fake_world(scenario, blue, missiles=(), red=None, terminal=None):
    return SimpleNamespace(config=ScenarioConfig.for_scenario(scenario),
                           blue=blue, missiles=list(missiles), red=red,
                           terminal_cause=terminal)


# ---------------------------------------------------------------------------
# Actions

def test_decode_wraps_heading():
    cfg = ScenarioConfig.for_scenario("evade1")
    sp, _, clamped = decode_action(PilotAction(370.0, 8000.0), cfg)
    assert sp.heading == pytest.approx(math.radians(10.0))
    assert clamped is False


def test_decode_clamps_altitude_and_flags_it():
    cfg = ScenarioConfig.for_scenario("evade1")
    sp, _, clamped = decode_action(PilotAction(0.0, -500.0), cfg)
    assert sp.altitude == 0.0 and clamped is True
    sp, _, clamped = decode_action(PilotAction(0.0, 99999.0), cfg)
    assert sp.altitude == cfg.aircraft.alt_ceiling and clamped is True


def test_decode_throttle_fixed_vs_free():
    cfg = ScenarioConfig.for_scenario("evade1")
    sp, _, clamped = decode_action(PilotAction(0.0, 8000.0, throttle=0.3), cfg)
    assert sp.throttle == cfg.throttle_default and clamped is False
    cfg = ScenarioConfig.for_scenario("evade1", fixed_throttle=False)
    sp, _, _ = decode_action(PilotAction(0.0, 8000.0, throttle=0.3), cfg)
    assert sp.throttle == 0.3
    sp, _, clamped = decode_action(PilotAction(0.0, 8000.0, throttle=1.7), cfg)
    assert sp.throttle == 1.0 and clamped is True


def test_decode_launch_only_when_manual():
    auto = ScenarioConfig.for_scenario("dogfight")
    assert auto.auto_launch
    _, launch, _ = decode_action(PilotAction(0.0, 8000.0, launch=True), auto)
    assert launch is False
    manual = ScenarioConfig.for_scenario("dogfight", auto_launch=False)
    _, launch, _ = decode_action(PilotAction(0.0, 8000.0, launch=True), manual)
    assert launch is True


# ---------------------------------------------------------------------------
# Initial conditions

def test_evade1_sampling_in_ranges():
    cfg = ScenarioConfig.for_scenario("evade1")
    rng = np.random.default_rng(7)
    for _ in range(200):
        ic = sample_initial_conditions(rng, cfg)
        b = ic.blue
        assert cfg.agent_speed_range[0] <= b.v <= cfg.agent_speed_range[1]
        assert cfg.agent_alt_range[0] <= b.altitude <= cfg.agent_alt_range[1]
        assert 0.0 <= b.psi < 2.0 * math.pi
        assert (b.n, b.e) == (0.0, 0.0)
        assert len(ic.shooters) == 1
        s = ic.shooters[0]
        assert cfg.threat_speed_range[0] <= s.v <= cfg.threat_speed_range[1]
        assert cfg.threat_alt_range[0] <= s.altitude <= cfg.threat_alt_range[1]
        dist = math.hypot(s.n, s.e)
        assert cfg.firing_distance_range[0] <= dist <= cfg.firing_distance_range[1]
        # shooter nose points back at the agent
        brg = math.atan2(-s.e, -s.n) % (2.0 * math.pi)
        assert abs(s.psi - brg) < 1e-9 or abs(abs(s.psi - brg) - 2 * math.pi) < 1e-9
        assert s.missiles == 1


def test_evade2_draws_two_threats():
    cfg = ScenarioConfig.for_scenario("evade2")
    ic = sample_initial_conditions(np.random.default_rng(3), cfg)
    assert len(ic.shooters) == 2
    assert ic.shooters[0].position != ic.shooters[1].position


def test_draw_order_is_the_documented_sequence():
    cfg = ScenarioConfig.for_scenario("evade2")
    ic = sample_initial_conditions(np.random.default_rng(123), cfg)
    ref = np.random.default_rng(123)
    v = ref.uniform(*cfg.agent_speed_range)
    alt = ref.uniform(*cfg.agent_alt_range)
    hdg = math.radians(ref.uniform(*cfg.agent_heading_range_deg))
    assert (ic.blue.v, ic.blue.altitude) == (v, alt)
    assert ic.blue.psi == hdg
    for s in ic.shooters:
        sv = ref.uniform(*cfg.threat_speed_range)
        salt = ref.uniform(*cfg.threat_alt_range)
        dist = ref.uniform(*cfg.firing_distance_range)
        brg = math.radians(ref.uniform(0.0, 360.0))
        assert s.v == sv and s.altitude == pytest.approx(salt)
        assert s.n == pytest.approx(dist * math.cos(brg))
        assert s.e == pytest.approx(dist * math.sin(brg))


def test_dogfight_start_is_fixed_and_consumes_no_draws():
    cfg = ScenarioConfig.for_scenario("dogfight")
    rng = np.random.default_rng(5)
    ic = sample_initial_conditions(rng, cfg)
    assert ic.blue.position == (0.0, 0.0, -cfg.dogfight_alt)
    assert ic.blue.psi == 0.0 and ic.blue.v == cfg.dogfight_speed
    red = ic.shooters[0]
    assert red.position == (cfg.dogfight_separation, 0.0, -cfg.dogfight_alt)
    assert red.psi == math.pi
    assert ic.blue.missiles == red.missiles == cfg.missile_loadout
    # generator untouched
    assert rng.uniform() == np.random.default_rng(5).uniform()


# ---------------------------------------------------------------------------
# Observations

def test_evade1_observation_layout():
    blue = plane(alt=8000.0, v=320.0, psi=math.pi / 2, climb=12.0)
    m = fake_missile(launch=(0.0, 50000.0, -11000.0), nu=305.0, tau=7.0)
    w = fake_world("evade1", blue, [m])
    obs = build_observation(w)
    assert len(obs) == 9
    h, v_d, v, psi, nu, tau, eta, beta, rho = obs
    assert (h, v, nu, tau) == (8000.0, 320.0, 305.0, 7.0)
    assert v_d == -12.0                       # descent rate, positive downward
    assert psi == pytest.approx(math.pi / 2)
    assert eta == pytest.approx(0.0)          # launch dead ahead of the nose
    assert beta == 11000.0
    assert rho == pytest.approx(math.sqrt(50000.0 ** 2 + 3000.0 ** 2))


def test_eta_wraps_and_signs():
    blue = plane(psi=0.0)
    east = fake_missile(launch=(0.0, 40000.0, -8000.0))
    w = fake_world("evade1", blue, [east])
    assert build_observation(w)[6] == pytest.approx(math.pi / 2)
    behind = fake_missile(launch=(-40000.0, -1.0, -8000.0))
    w = fake_world("evade1", blue, [behind])
    eta = build_observation(w)[6]
    assert abs(eta) <= math.pi and eta == pytest.approx(-math.pi, abs=1e-4)


def test_eta_degenerate_overhead_is_zero():
    blue = plane(n=100.0, e=200.0, alt=8000.0)
    above = fake_missile(launch=(100.0, 200.0, -12000.0))
    w = fake_world("evade1", blue, [above])
    obs = build_observation(w)
    assert obs[6] == 0.0
    assert obs[8] == pytest.approx(4000.0)


def test_evade2_observation_is_14_long():
    blue = plane()
    ms = [fake_missile(), fake_missile(launch=(10000.0, 0.0, -9000.0))]
    obs = build_observation(fake_world("evade2", blue, ms))
    assert len(obs) == 14
    assert obs[4:9] != obs[9:14]


def test_dogfight_observation_with_and_without_inbound():
    blue = plane(alt=10000.0, v=300.0, psi=0.0)
    red = plane(n=60000.0, alt=10000.0, v=300.0, psi=math.pi)
    w = fake_world("dogfight", blue, [], red=red)
    obs = build_observation(w)
    assert len(obs) == 11
    assert obs[0] == pytest.approx(60000.0)       # rho_br
    assert obs[1] == pytest.approx(0.0)           # nu_br
    assert obs[7:] == [obs[0], obs[1], red.v, red.altitude]  # mirrored block

    m = fake_missile(launch=(60000.0, 0.0, -10000.0), nu=300.0, tau=3.0,
                     target_id="blue")
    w = fake_world("dogfight", blue, [m], red=red)
    obs = build_observation(w)
    assert obs[7] == pytest.approx(60000.0)       # rho to launch point
    assert obs[8] == pytest.approx(0.0)           # eta
    assert obs[9] == 300.0                        # nu
    assert obs[10] == 10000.0                     # beta


def test_dogfight_block_tracks_oldest_active_inbound():
    blue = plane()
    red = plane(n=60000.0, psi=math.pi)
    first = fake_missile(launch=(60000.0, 0.0, -10000.0), nu=310.0)
    newer = fake_missile(launch=(50000.0, 0.0, -10000.0), nu=320.0)
    own = fake_missile(launch=(0.0, 0.0, -10000.0), target_id="red")
    dead = fake_missile(launch=(1.0, 1.0, -10000.0), active=False)
    w = fake_world("dogfight", blue, [own, dead, first, newer], red=red)
    assert build_observation(w)[9] == 310.0
    first.active = False
    assert build_observation(w)[9] == 320.0


def test_normalization_scales():
    raw = [20000.0, 600.0, 600.0, math.pi,
           600.0, 300.0, -math.pi, 20000.0, 100000.0]
    out = normalize_observation(raw, "evade1")
    assert out == pytest.approx([1.0] * 6 + [-1.0, 1.0, 1.0])
    with pytest.raises(ValueError, match="length"):
        normalize_observation(raw[:5], "evade1")


def test_observation_spec_matches_layout():
    for scen, n in (("evade1", 9), ("evade2", 14), ("dogfight", 11)):
        spec = observation_spec(ScenarioConfig.for_scenario(scen))
        assert spec["shape"] == (n,)
        assert len(spec["names"]) == n == len(spec["low"]) == len(spec["high"])
        assert all(lo < hi for lo, hi in zip(spec["low"], spec["high"]))
    raw = observation_spec(ScenarioConfig.for_scenario("evade1"))
    norm = observation_spec(ScenarioConfig.for_scenario("evade1",
                                                        normalized_obs=True))
    assert norm["normalized"] and not raw["normalized"]
    # normalized bounds are the raw bounds over the per-kind scale
    ratios = [r / n for r, n in zip(raw["high"], norm["high"]) if n != 0.0]
    assert all(r > 1.0 for r in ratios)         # scales compress real units
    obs = [15000.0, -30.0, 320.0, 1.0, 300.0, 12.0, 0.5, 10000.0, 42000.0]
    scaled = normalize_observation(obs, "evade1")
    for lo, hi, x in zip(norm["low"], norm["high"], scaled):
        assert lo <= x <= hi


def test_action_spec_variants():
    spec = action_spec(ScenarioConfig.for_scenario("evade1"))
    assert spec["names"] == ["heading_deg", "altitude_m"]
    spec = action_spec(ScenarioConfig.for_scenario("evade1",
                                                   fixed_throttle=False))
    assert spec["names"] == ["heading_deg", "altitude_m", "throttle"]
    spec = action_spec(ScenarioConfig.for_scenario("dogfight",
                                                   auto_launch=False))
    assert spec["names"][-1] == "launch"
    spec = action_spec(ScenarioConfig.for_scenario("dogfight"))
    assert "launch" not in spec["names"]


# ---------------------------------------------------------------------------
# Rewards

def test_evade1_reward_is_miss_distance_km():
    w = fake_world("evade1", plane(), [fake_missile(md=4500.0)],
                   terminal="evaded")
    assert terminal_reward_evade1(w) == 4.5
    assert terminal_reward(w) == 4.5


def test_evade_reward_zero_when_blue_dies():
    w = fake_world("evade1", plane(alive=False), [fake_missile(md=0.0)],
                   terminal="hit")
    assert terminal_reward_evade1(w) == 0.0
    w = fake_world("evade1", plane(alive=False), [fake_missile(md=123.0)],
                   terminal="ground_impact")
    assert terminal_reward_evade1(w) == 0.0


def test_evade2_reward_is_min_of_both():
    ms = [fake_missile(md=9000.0), fake_missile(md=2500.0)]
    w = fake_world("evade2", plane(), ms, terminal="evaded")
    assert terminal_reward_evade2(w) == 2.5


def test_reward_before_terminal_raises():
    w = fake_world("evade1", plane(), [fake_missile()], terminal=None)
    with pytest.raises(ValueError, match="before episode end"):
        terminal_reward(w)


def test_dogfight_reward_sign():
    w = fake_world("dogfight", plane(), [], terminal="red_destroyed")
    assert reward_dogfight(w) == 1.0
    for cause in ("blue_destroyed", "timeout"):
        w = fake_world("dogfight", plane(), [], terminal=cause)
        assert reward_dogfight(w) == -1.0


# ---------------------------------------------------------------------------
# Launch gating

def test_auto_launch_gates():
    cfg = ScenarioConfig.for_scenario("dogfight")
    me = plane(missiles=2)
    foe = plane(n=40000.0)
    assert auto_launch_check(me, foe, cfg) is True
    assert auto_launch_check(plane(missiles=0), foe, cfg) is False
    far = plane(n=cfg.launch_envelope + 1.0)
    assert auto_launch_check(me, far, cfg) is False
    at_edge = plane(n=cfg.launch_envelope)
    assert auto_launch_check(me, at_edge, cfg) is False   # strict inside
    aside = plane(n=0.0, e=40000.0)   # 90 deg off the nose
    assert auto_launch_check(me, aside, cfg) is False
    assert auto_launch_check(plane(missiles=2, alive=False), foe, cfg) is False
    assert auto_launch_check(me, plane(n=40000.0, alive=False), cfg) is False
