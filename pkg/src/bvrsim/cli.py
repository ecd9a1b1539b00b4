"""Command line front end.

    bvrsim run    --scenario evade1 --policy dive-turn --seed 7 --episodes 3 --out runs
    bvrsim replay runs/ep_000007.jsonl
    bvrsim export runs/ep_000007.jsonl --out plots

Exit codes: 0 success, 1 usage error, 2 runtime error, 3 replay
divergence.  All outputs are deterministic given the flags: seeds are
explicit and nothing depends on wall-clock time.
"""

import argparse
import csv
import math
import os
import sys

from . import atmosphere
from .config import SCENARIOS, ScenarioConfig, load_config
from .engine import EpisodeLog, LogVersionError, replay_log, run_episodes
from .policies import builtin_names

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_DIVERGENCE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bvrsim", description=__doc__.strip().splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run episodes and write logs + summary")
    run.add_argument("--scenario", choices=SCENARIOS, default=None)
    run.add_argument("--policy", default="straight",
                     help=f"one of {', '.join(builtin_names())} or module:callable")
    run.add_argument("--seed", type=int, default=0, help="first episode seed")
    run.add_argument("--episodes", type=int, default=1)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", default=None, help="directory for logs + summary.csv")
    run.add_argument("--config", default=None, help="INI config path (flags win)")

    rep = sub.add_parser("replay", help="re-simulate a log and verify it")
    rep.add_argument("log", help="episode log path (.jsonl)")

    exp = sub.add_parser("export", help="dump per-unit plot columns from a log")
    exp.add_argument("log", help="episode log path (.jsonl)")
    exp.add_argument("--kind", choices=["kinematics"], default="kinematics")
    exp.add_argument("--out", default=".", help="output directory")
    return p


def _build_config(args) -> ScenarioConfig:
    if args.config is not None:
        overrides = {}
        if args.scenario is not None:
            overrides["scenario"] = args.scenario
        return load_config(args.config, **overrides)
    return ScenarioConfig.for_scenario(args.scenario or "evade1")


def cmd_run(args) -> int:
    config = _build_config(args)
    seeds = list(range(args.seed, args.seed + args.episodes))
    if not seeds:
        print("no episodes requested")
        return EXIT_OK
    summaries = run_episodes(args.policy, config, seeds,
                             workers=args.workers, out_dir=args.out)
    rows = []
    for s in summaries:
        md_min = min(s.md.values()) if s.md else math.nan
        rows.append({
            "seed": s.seed, "scenario": s.scenario, "outcome": s.terminal_cause,
            "reward": f"{s.reward:.6g}",
            "md_min_m": "" if math.isnan(md_min) else f"{md_min:.1f}",
            "duration_s": f"{s.duration_s:.2f}",
            "shots_blue": s.shots.get("blue", 0),
            "shots_red": s.shots.get("red", 0),
            "log": s.log_path or "",
        })
    cols = list(rows[0].keys())
    if args.out is not None:
        with open(os.path.join(args.out, "summary.csv"), "w", newline="",
                  encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=cols)
            writer.writeheader()
            writer.writerows(rows)
    print("\t".join(cols))
    for row in rows:
        print("\t".join(str(row[c]) for c in cols))
    return EXIT_OK


def cmd_replay(args) -> int:
    log = EpisodeLog.load(args.log)
    report = replay_log(log)
    if report.identical:
        print(f"identical ({len(log.ticks)} ticks)")
        return EXIT_OK
    print(f"divergence at tick {report.divergence_tick}: {report.detail}")
    return EXIT_DIVERGENCE


def _unit_rows(log: EpisodeLog):
    """Yield (unit, rows) with columns t/alt/speed/mach/heading/range."""
    units = {}

    def add(unit, t, alt, speed, heading_deg, rng):
        alt_c = min(max(alt, -1900.0), 31000.0)
        units.setdefault(unit, []).append(
            (t, alt, speed, atmosphere.mach(speed, alt_c), heading_deg, rng))

    for rec in log.ticks:
        t = rec["t"]
        blue = rec["blue"]
        bn, be, bd, bv = blue[0], blue[1], blue[2], blue[3]
        ref = None
        if rec.get("red") is not None:
            red = rec["red"]
            ref = (red[0], red[1], red[2])
        elif rec["missiles"]:
            first = next(iter(rec["missiles"].values()))
            ref = (first[0], first[1], first[2])
        rng_b = math.dist((bn, be, bd), ref) if ref else math.nan
        add("blue", t, -bd, bv, math.degrees(blue[4]) % 360.0, rng_b)
        if rec.get("red") is not None:
            red = rec["red"]
            add("red", t, -red[2], red[3], math.degrees(red[4]) % 360.0,
                math.dist((red[0], red[1], red[2]), (bn, be, bd)))
        for mid, m in rec["missiles"].items():
            speed = math.sqrt(m[3] ** 2 + m[4] ** 2 + m[5] ** 2)
            heading = math.degrees(math.atan2(m[4], m[3])) % 360.0
            add(mid, t, -m[2], speed, heading,
                math.dist((m[0], m[1], m[2]), (bn, be, bd)))
    return units


def cmd_export(args) -> int:
    log = EpisodeLog.load(args.log)
    if not log.ticks:
        raise RuntimeError("no ticks in log")
    os.makedirs(args.out, exist_ok=True)
    stem = os.path.splitext(os.path.basename(args.log))[0]
    header = ["t_s", "altitude_m", "speed_mps", "mach", "heading_deg",
              "range_to_opposite_m"]
    for unit, rows in _unit_rows(log).items():
        path = os.path.join(args.out, f"{stem}_{unit}.tsv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\t".join(header) + "\n")
            for row in rows:
                fh.write("\t".join(f"{x:.6g}" for x in row) + "\n")
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "replay":
            return cmd_replay(args)
        return cmd_export(args)
    except LogVersionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, ValueError, RuntimeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
