"""Policy and baseline evaluation over sets of start positions."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .agent.dqn import plan
from .agent.network import NetworkParams
from .env import TrajectoryEnv

METRIC_COLUMNS = ["policy", "n_starts", "success_rate", "mean_length", "mean_sir", "mean_sir_db", "violations"]
TRAJECTORY_COLUMNS = ["step", "x", "y", "sir_db", "association"]


def evaluation_starts(env: TrajectoryEnv, n: int, seed: int) -> list[np.ndarray]:
    """``n`` random lattice starts drawn from a stream independent of training."""
    rng = np.random.default_rng([seed, 1])
    return [env.reset(rng) for _ in range(n)]


@dataclass(frozen=True)
class PolicySummary:
    policy: str
    n_starts: int
    success_rate: float
    mean_length: float
    mean_sir: float  # linear, mean over starts of the per-path mean
    violations: int  # visited nodes below the SIR floor, summed over starts

    @property
    def mean_sir_db(self) -> float:
        return 10.0 * math.log10(self.mean_sir) if self.mean_sir > 0 else float("-inf")

    def row(self) -> list:
        return [
            self.policy, self.n_starts, repr(self.success_rate), repr(self.mean_length),
            repr(self.mean_sir), repr(self.mean_sir_db), self.violations,
        ]


def summarize(name: str, env: TrajectoryEnv, paths) -> PolicySummary:
    metrics = [env.evaluate_path(list(p)) for p in paths]
    if not metrics:
        raise ValueError("nothing to summarize: no paths given")
    moved = [m.mean_sir for m in metrics if m.length > 0]
    return PolicySummary(
        policy=name,
        n_starts=len(metrics),
        success_rate=float(np.mean([m.reached for m in metrics])),
        mean_length=float(np.mean([m.length for m in metrics])),
        mean_sir=float(np.mean(moved)) if moved else 0.0,
        violations=int(sum(m.violations for m in metrics)),
    )


def evaluate_policy(params: NetworkParams, env: TrajectoryEnv, starts, name: str = "policy"):
    """Greedy trajectories from every start and their summary."""
    trajectories = [plan(params, s, env) for s in starts]
    return trajectories, summarize(name, env, [t.positions for t in trajectories])


def evaluate_baseline(env: TrajectoryEnv, starts, name: str = "baseline"):
    paths = [env.shortest_path_baseline(s) for s in starts]
    return paths, summarize(name, env, paths)


def trajectory_rows(env: TrajectoryEnv, positions) -> list[list]:
    rows = []
    for k, q in enumerate(positions):
        if env.inside(q):
            sir_db, assoc = 10.0 * math.log10(env.sir(q)), env.association(q)
        else:
            sir_db, assoc = float("nan"), -1
        rows.append([k, repr(float(q[0])), repr(float(q[1])), repr(sir_db), assoc])
    return rows


def write_trajectory_csv(path, env: TrajectoryEnv, positions) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRAJECTORY_COLUMNS)
        w.writerows(trajectory_rows(env, positions))


def write_metrics_csv(path, summaries) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(METRIC_COLUMNS)
        for s in summaries:
            w.writerow(s.row())
