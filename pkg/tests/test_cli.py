"""Command-line interface, end to end through main(argv)."""

import csv
import json
import math
import subprocess
import sys

import pytest

from bvrsim import cli
from bvrsim.config import ScenarioConfig, save_config


def run_cli(*argv):
    return cli.main(list(argv))


def make_logs(tmp_path, episodes=1, seed=3, scenario="evade1",
              policy="straight"):
    out = tmp_path / "runs"
    rc = run_cli("run", "--scenario", scenario, "--policy", policy,
                 "--seed", str(seed), "--episodes", str(episodes),
                 "--out", str(out))
    assert rc == cli.EXIT_OK
    return out


def test_run_writes_summary_and_logs(tmp_path, capsys):
    out = make_logs(tmp_path, episodes=2)
    files = sorted(p.name for p in out.iterdir())
    assert files == ["ep_000003.jsonl", "ep_000004.jsonl", "summary.csv"]
    with open(out / "summary.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["seed"] for r in rows] == ["3", "4"]
    assert all(r["scenario"] == "evade1" for r in rows)
    assert rows[0]["outcome"] == "hit" and rows[0]["md_min_m"] == "0.0"
    table = capsys.readouterr().out.splitlines()
    assert table[0].split("\t")[0] == "seed"
    assert len(table) == 3


def test_run_without_out_dir_prints_only(capsys):
    assert run_cli("run", "--scenario", "evade1", "--seed", "3") == cli.EXIT_OK
    assert "hit" in capsys.readouterr().out


def test_run_zero_episodes_is_a_noop(capsys):
    assert run_cli("run", "--scenario", "evade1", "--episodes", "0") == cli.EXIT_OK
    assert "no episodes" in capsys.readouterr().out


def test_run_uses_config_file_and_flags_win(tmp_path, capsys):
    cfg = ScenarioConfig.for_scenario("evade2")
    path = tmp_path / "cfg.ini"
    save_config(cfg, str(path))
    assert run_cli("run", "--config", str(path), "--seed", "1") == cli.EXIT_OK
    assert "evade2" in capsys.readouterr().out
    assert run_cli("run", "--config", str(path), "--scenario", "evade1",
                   "--seed", "1") == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "evade1" in out and "evade2" not in out


def test_replay_identical(tmp_path, capsys):
    out = make_logs(tmp_path)
    rc = run_cli("replay", str(out / "ep_000003.jsonl"))
    assert rc == cli.EXIT_OK
    assert "identical" in capsys.readouterr().out


def test_replay_divergence_exit_code(tmp_path, capsys):
    out = make_logs(tmp_path)
    path = out / "ep_000003.jsonl"
    lines = path.read_text().splitlines()
    rec = json.loads(lines[600])
    rec["blue"][3] = math.nextafter(rec["blue"][3], 0.0)   # one-ulp nudge
    lines[600] = json.dumps(rec, separators=(",", ":"))
    path.write_text("\n".join(lines) + "\n")
    rc = run_cli("replay", str(path))
    assert rc == cli.EXIT_DIVERGENCE
    assert "divergence at tick 599" in capsys.readouterr().out


def test_replay_version_mismatch_is_runtime_error(tmp_path, capsys):
    out = make_logs(tmp_path)
    path = out / "ep_000003.jsonl"
    lines = path.read_text().splitlines()
    header = json.loads(lines[0])
    header["version"] = "0.0.0"
    lines[0] = json.dumps(header, separators=(",", ":"))
    path.write_text("\n".join(lines) + "\n")
    assert run_cli("replay", str(path)) == cli.EXIT_RUNTIME
    assert "version" in capsys.readouterr().err


def test_replay_missing_file_is_runtime_error(tmp_path, capsys):
    assert run_cli("replay", str(tmp_path / "nope.jsonl")) == cli.EXIT_RUNTIME
    assert "error" in capsys.readouterr().err


def test_export_kinematics(tmp_path, capsys):
    out = make_logs(tmp_path)
    plots = tmp_path / "plots"
    rc = run_cli("export", str(out / "ep_000003.jsonl"), "--out", str(plots))
    assert rc == cli.EXIT_OK
    blue = plots / "ep_000003_blue.tsv"
    m1 = plots / "ep_000003_M1.tsv"
    assert blue.exists() and m1.exists()
    header, *rows = m1.read_text().splitlines()
    assert header.split("\t") == ["t_s", "altitude_m", "speed_mps", "mach",
                                  "heading_deg", "range_to_opposite_m"]
    t = [float(r.split("\t")[0]) for r in rows]
    assert t == sorted(t) and len(t) > 1000
    mach = [float(r.split("\t")[3]) for r in rows]
    assert 3.2 < max(mach) < 4.6          # boost ends near Mach 4
    rng = [float(r.split("\t")[5]) for r in rows]
    assert rng[-1] < rng[0]               # missile closed on the target


def test_export_empty_log_is_runtime_error(tmp_path, capsys):
    path = tmp_path / "empty.jsonl"
    path.write_text('{"format":"bvrsim-log-v1"}\n{"footer":true}\n')
    assert run_cli("export", str(path)) == cli.EXIT_RUNTIME
    assert "no ticks" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ("frobnicate",),
    ("run", "--scenario", "evade9"),
    ("replay",),
    ("run", "--episodes", "many"),
])
def test_usage_errors_exit_1(argv, capsys):
    assert run_cli(*argv) == cli.EXIT_USAGE
    capsys.readouterr()


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "bvrsim.cli", "run", "--scenario", "evade1",
         "--seed", "3"],
        capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert "hit" in proc.stdout
