"""Command-line entry point: ``rainuav validate | map | train | plan | eval``.

Exit codes: 0 success, 1 validation gate failed, 2 configuration error,
3 numerical failure, 4 artifact or digest mismatch.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import radiomap, validation
from .agent.checkpoint import Checkpoint, load_checkpoint, save_checkpoint, write_training_log
from .agent.dqn import train
from .env import TrajectoryEnv
from .errors import ConfigurationError, DigestMismatchError, DomainError, FormatError, NumericalError
from .evaluation import evaluate_baseline, evaluate_policy, evaluation_starts, write_metrics_csv, write_trajectory_csv

EXIT_OK = 0
EXIT_GATE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_MISMATCH = 4

OUT_ENV = "RAINUAV_OUT"
DEFAULT_OUT = "rainuav-out"
CHECKPOINT_NAME = "checkpoint.qnet"


def _tolerance(text: str) -> float:
    """Relative tolerance as a fraction (``0.25``) or a percentage (``25%``)."""
    try:
        value = float(text[:-1]) / 100.0 if text.endswith("%") else float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid tolerance {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("tolerance must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rainuav", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="run configuration YAML file")
    src.add_argument("--scenario", help="name of a bundled scenario (see 'rainuav map --list')")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="ITU-R vs PWE specific attenuation table")
    p.add_argument("--rain-rate", type=float)
    p.add_argument("--frequencies", type=float, nargs="+", metavar="GHZ")
    p.add_argument("--tolerance", type=_tolerance, help="relative error gate, e.g. 0.25 or 25%%")

    p = sub.add_parser("map", parents=[common], help="build and persist RSS/SIR maps")
    p.add_argument("--list", action="store_true", help="list bundled scenarios and exit")

    p = sub.add_parser("train", parents=[common], help="train the agent on a map")
    p.add_argument("--map", type=Path, help="map file (default: <out>/<map.output>, built if absent)")
    p.add_argument("--episodes", type=int, help="override the number of training episodes")
    p.add_argument("--force", action="store_true", help="accept a map built for different physics")

    for name, text in (("plan", "greedy trajectory from one start"), ("eval", "trajectories and metrics over many starts")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--map", type=Path)
        p.add_argument("--checkpoint", type=Path, help=f"default: <out>/{CHECKPOINT_NAME}")
        p.add_argument("--force", action="store_true", help="accept mismatched map/checkpoint digests")
        if name == "plan":
            p.add_argument("--start", type=float, nargs=2, metavar=("X", "Y"), required=True)
    return parser


# ---------------------------------------------------------------- helpers


def _load_run_config(args, default_scenario: str | None = None) -> cfgmod.RunConfig:
    if args.config is not None:
        return cfgmod.load_config(args.config)
    if args.scenario is not None:
        return cfgmod.load_bundled(args.scenario)
    if default_scenario is not None:
        return cfgmod.load_bundled(default_scenario)
    raise ConfigurationError("give --config FILE or --scenario NAME")


def _out_dir(args) -> Path:
    out = args.out or Path(os.environ.get(OUT_ENV) or DEFAULT_OUT)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _seed(args, run: cfgmod.RunConfig) -> int:
    return run.seed if args.seed is None else args.seed


def _map_path(args, run: cfgmod.RunConfig, out: Path) -> Path:
    return args.map if args.map is not None else out / run.map.output


def _check_map(rss: radiomap.RssMap, scenario: radiomap.Scenario, force: bool) -> None:
    problems = []
    if rss.medium_digest != scenario.medium_digest():
        problems.append("medium (rain, frequency or polarizability form)")
    if rss.scenario_digest != scenario.digest():
        problems.append("scenario geometry or numerics")
    if problems and not force:
        raise DigestMismatchError(
            f"map was built for a different {' and '.join(problems)}; rebuild it with 'rainuav map' or pass --force"
        )


def _obtain_map(args, run, scenario, out) -> radiomap.RssMap:
    path = _map_path(args, run, out)
    if path.exists():
        rss = radiomap.load_map(path)
        _check_map(rss, scenario, args.force)
        return rss
    if args.map is not None:
        raise ConfigurationError(f"map file {path} does not exist")
    rss = radiomap.build_rss_map(scenario)
    radiomap.save_map(path, rss)
    print(f"built map {path}")
    return rss


def _load_ckpt(args, out: Path, rss: radiomap.RssMap) -> Checkpoint:
    path = args.checkpoint or out / CHECKPOINT_NAME
    if not path.exists():
        raise ConfigurationError(f"checkpoint {path} does not exist; run 'rainuav train' first")
    ckpt = load_checkpoint(path)
    if not args.force:
        if ckpt.medium_digest != rss.medium_digest:
            raise DigestMismatchError(f"checkpoint {path} was trained on a different medium; pass --force to use it anyway")
        if ckpt.scenario_digest != rss.scenario_digest:
            raise DigestMismatchError(f"checkpoint {path} was trained on a different scenario; pass --force to use it anyway")
    return ckpt


def _make_env(run, ckpt_config, rss) -> TrajectoryEnv:
    sir = radiomap.sir_map(rss)
    return TrajectoryEnv(sir, run.episode_config(ckpt_config, rss.geometry.spacing))


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    run = _load_run_config(args, default_scenario="fig3_validation")
    v = run.validation
    rain_rate = v.rain_rate if args.rain_rate is None else args.rain_rate
    freqs = v.frequencies if args.frequencies is None else args.frequencies
    tol = v.tolerance if args.tolerance is None else args.tolerance
    if rain_rate < 0:
        raise ConfigurationError("rain rate must be non-negative")
    for f in freqs:
        validation.coefficients(f)  # range check before any output
    out = _out_dir(args)
    rows = validation.compare_models(rain_rate, freqs, run.pwe_settings())
    path = out / "validation.csv"
    validation.write_comparison_csv(path, rows)
    failed = False
    print(f"R = {rain_rate} mm/h, tolerance {tol:.0%}")
    print(f"{'f (GHz)':>8} {'ITU dB/km':>11} {'PWE dB/km':>11} {'rel err':>9}")
    for r in rows:
        bad = not r.relative_error <= tol
        failed |= bad
        print(f"{r.frequency:8g} {r.itu_db_per_km:11.5f} {r.pwe_db_per_km:11.5f} {r.relative_error:9.3f}{'  FAIL' if bad else ''}")
    print(f"wrote {path}")
    return EXIT_GATE if failed else EXIT_OK


def cmd_map(args) -> int:
    if args.list:
        print("\n".join(cfgmod.bundled_scenarios()))
        return EXIT_OK
    run = _load_run_config(args)
    scenario = run.build_scenario()
    out = _out_dir(args)
    rss = radiomap.build_rss_map(scenario)
    sir = radiomap.sir_map(rss)
    path = out / run.map.output
    radiomap.save_map(path, rss)
    radiomap.write_sir_csv(out / "sir.csv", sir)
    radiomap.write_rss_csv(out / "rss.csv", rss)
    db = sir.sir_db
    print(f"nodes {rss.n_nodes}, base stations {rss.n_base_stations}")
    print(f"SIR dB min {db.min():.3f} mean {db.mean():.3f} max {db.max():.3f}")
    print(f"mean RSS {rss.rss.mean():.6e}")
    print(f"wrote {path}, {out / 'sir.csv'}, {out / 'rss.csv'}")
    return EXIT_OK


def cmd_train(args) -> int:
    run = _load_run_config(args)
    scenario = run.build_scenario()
    tc = run.train_config(episodes=args.episodes, seed=_seed(args, run))
    out = _out_dir(args)
    rss = _obtain_map(args, run, scenario, out)
    env = _make_env(run, tc, rss)
    started = time.perf_counter()

    def progress(rec):
        if (rec.episode + 1) % tc.log_window == 0:
            print(f"episode {rec.episode + 1:5d}  moving avg return {rec.moving_avg_return:10.2f}  eps {rec.epsilon:.4f}",
                  file=sys.stderr)

    result = train(env, tc, progress)
    ckpt_path = out / CHECKPOINT_NAME
    save_checkpoint(ckpt_path, Checkpoint(result.params, tc, rss.medium_digest, rss.scenario_digest))
    write_training_log(out / "training_log.csv", result.log)
    print(f"trained {tc.episodes} episodes in {time.perf_counter() - started:.1f} s; "
          f"final moving avg return {result.log[-1].moving_avg_return:.2f}")
    print(f"wrote {ckpt_path}, {out / 'training_log.csv'}")
    return EXIT_OK


def cmd_plan(args) -> int:
    run = _load_run_config(args)
    run.require_scenario()
    out = _out_dir(args)
    rss = radiomap.load_map(_map_path(args, run, out))
    ckpt = _load_ckpt(args, out, rss)
    env = _make_env(run, ckpt.config, rss)
    start = np.array(args.start, dtype=float)
    if not env.inside(start):
        raise ConfigurationError(f"start {tuple(args.start)} lies outside the footprint")
    traj, summary = evaluate_policy(ckpt.params, env, [start])
    path = out / "trajectory.csv"
    write_trajectory_csv(path, env, traj[0].positions)
    print(f"{traj[0].n_steps} steps, terminal {traj[0].terminal.name.lower()}, mean SIR {summary.mean_sir_db:.3f} dB")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_eval(args) -> int:
    run = _load_run_config(args)
    run.require_scenario()
    out = _out_dir(args)
    rss = radiomap.load_map(_map_path(args, run, out))
    ckpt = _load_ckpt(args, out, rss)
    env = _make_env(run, ckpt.config, rss)
    ev = run.evaluation
    if ev.starts is not None:
        starts = [np.array(s, dtype=float) for s in ev.starts]
        for s in starts:
            if not env.inside(s):
                raise ConfigurationError(f"evaluation start {tuple(s)} lies outside the footprint")
    else:
        starts = evaluation_starts(env, ev.random_starts, _seed(args, run))
    trajectories, summary = evaluate_policy(ckpt.params, env, starts)
    summaries = [summary]
    if ev.baseline:
        summaries.append(evaluate_baseline(env, starts)[1])
    tdir = out / "trajectories"
    tdir.mkdir(exist_ok=True)
    width = max(3, len(str(len(starts) - 1)))
    for k, t in enumerate(trajectories):
        write_trajectory_csv(tdir / f"start_{k:0{width}d}.csv", env, t.positions)
    write_metrics_csv(out / "metrics.csv", summaries)
    for s in summaries:
        print(f"{s.policy:9s} success {s.success_rate:.3f}  mean length {s.mean_length:.2f}  "
              f"mean SIR {s.mean_sir_db:.3f} dB  violations {s.violations}")
    print(f"wrote {out / 'metrics.csv'} and {len(trajectories)} trajectories in {tdir}")
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "map": cmd_map, "train": cmd_train, "plan": cmd_plan, "eval": cmd_eval}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigurationError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DigestMismatchError, FormatError) as exc:
        print(f"artifact mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
