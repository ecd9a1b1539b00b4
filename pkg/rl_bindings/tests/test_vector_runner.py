"""Batch-runner tests: call-convention adaptation, delegation, ordering."""

import numpy as np
import pytest

from bvrsim import EpisodeLog, PilotAction, ScenarioConfig, run_episodes
from bvrsim_rl import ArrayPolicy, VectorRunner


def engine_style_policy(obs, world):
    return PilotAction(45.0, 6000.0)


def array_style_policy(obs):
    return np.array([45.0, 6000.0])


def _cfg():
    return ScenarioConfig.for_scenario("evade1")


def test_builtin_name_matches_direct_engine_run():
    seeds = [3, 1]
    ours = VectorRunner(_cfg()).run("straight", seeds)
    theirs = run_episodes("straight", _cfg(), seeds)
    assert [r.seed for r in ours] == seeds
    assert [(r.reward, r.ticks, r.terminal_cause) for r in ours] == \
           [(r.reward, r.ticks, r.terminal_cause) for r in theirs]


def test_array_policy_equals_engine_policy():
    seeds = [5, 8]
    vr = VectorRunner(_cfg())
    a = vr.run(array_style_policy, seeds)
    b = vr.run(engine_style_policy, seeds)
    assert [(r.reward, r.ticks) for r in a] == [(r.reward, r.ticks) for r in b]


def test_array_policy_wrapper_builds_named_fields():
    ap = ArrayPolicy(lambda obs: [272.5, 4321.0], ("heading_deg", "altitude_m"))
    act = ap([0.0] * 9, None)
    assert act == PilotAction(272.5, 4321.0)
    ap4 = ArrayPolicy(lambda obs: [10.0, 9000.0, 0.7, 1.0],
                      ("heading_deg", "altitude_m", "throttle", "launch"))
    act = ap4([0.0], None)
    assert act == PilotAction(10.0, 9000.0, 0.7, True)
    ap4 = ArrayPolicy(lambda obs: [10.0, 9000.0, 0.7, 0.0],
                      ("heading_deg", "altitude_m", "throttle", "launch"))
    assert ap4([0.0], None).launch is False


def test_array_policy_wrong_width_raises():
    ap = ArrayPolicy(lambda obs: [1.0], ("heading_deg", "altitude_m"))
    with pytest.raises(ValueError, match="expected 2"):
        ap([0.0], None)


def test_non_policy_rejected():
    with pytest.raises(TypeError, match="callable"):
        VectorRunner(_cfg()).run(42, [1])


def test_out_dir_writes_loadable_logs(tmp_path):
    out = tmp_path / "batch"
    res = VectorRunner(_cfg()).run("straight", [4], out_dir=str(out))
    assert res[0].log_path is not None
    log = EpisodeLog.load(res[0].log_path)
    assert log.footer["ticks"] == res[0].ticks


def test_workers_match_serial():
    cfg = _cfg()
    seeds = [2, 6]
    serial = VectorRunner(cfg, workers=1).run("dive-turn", seeds)
    parallel = VectorRunner(cfg, workers=2).run("dive-turn", seeds)
    assert [(r.seed, r.reward, r.ticks) for r in serial] == \
           [(r.seed, r.reward, r.ticks) for r in parallel]


def test_mean_reward_is_plain_average():
    vr = VectorRunner(_cfg())
    seeds = [3, 1]
    res = vr.run("straight", seeds)
    assert vr.mean_reward("straight", seeds) == pytest.approx(
        np.mean([r.reward for r in res]))
