"""Deterministic trajectory MDP on the flight-plane SIR map.

States are UAV positions on the map's node lattice, actions are unit moves
along +x, -x, +y, -y scaled by the step length (one grid cell), and the
per-step reward is ``-1 + mu * SIR`` with SIR linear, best-association and
capped. Terminal bonuses for reaching the destination or leaving the
airspace are *not* part of the reward; the agent adds them when it builds
learning targets, using the terminal tag reported here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .radiomap import SirMap

ACTIONS = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
N_ACTIONS = len(ACTIONS)


class Terminal(enum.IntEnum):
    NONE = 0
    DESTINATION = 1
    OUT_OF_BOUNDS = 2
    STEP_CAP = 3


@dataclass(frozen=True)
class EpisodeConfig:
    destination: tuple[float, float]
    step_length: float = 50.0
    d_tol: float = 10.0
    max_steps: int = 300
    mu: float = 10.0 / 43.0
    r_des: float = 2000.0
    p_ob: float = 10000.0
    sir_min_db: float = 10.0
    sir_cap_db: float = 60.0
    sir_violation_penalty: float = 0.0
    start: tuple[float, float] | None = None

    def __post_init__(self):
        if self.d_tol <= 0:
            raise ConfigurationError("d_tol must be positive")
        if self.step_length <= 0:
            raise ConfigurationError("step_length must be positive")
        if self.mu < 0:
            raise ConfigurationError("mu must be non-negative")
        if self.max_steps < 1:
            raise ConfigurationError("max_steps must be at least 1")

    @property
    def sir_cap(self) -> float:
        return 10.0 ** (self.sir_cap_db / 10.0)


@dataclass(frozen=True)
class StepOutcome:
    state: np.ndarray
    reward: float
    terminal: Terminal
    sir_db: float
    association: int


@dataclass(frozen=True)
class PathMetrics:
    length: int
    total_sir: float
    mean_sir: float
    min_sir_db: float
    violations: int
    objective: float
    reached: bool = False


class TrajectoryEnv:
    """Episode dynamics over a read-only ``SirMap``."""

    def __init__(self, sir_map: SirMap, config: EpisodeConfig):
        self.sir_map = sir_map
        self.config = config
        geo = sir_map.geometry
        self.lo = np.array([geo.x_lo, geo.y_lo])
        self.hi = np.array([geo.x_hi, geo.y_hi])
        self.destination = np.asarray(config.destination, dtype=float)
        if not self.inside(self.destination):
            raise ConfigurationError(f"destination {config.destination} outside the footprint")
        if not math.isclose(config.step_length, geo.spacing):
            raise ConfigurationError(
                f"step length {config.step_length} m must equal the map spacing {geo.spacing} m"
            )

    # geometry helpers
    def inside(self, q) -> bool:
        q = np.asarray(q)
        return bool(np.all(q >= self.lo) and np.all(q <= self.hi))

    def at_destination(self, q) -> bool:
        return float(np.linalg.norm(np.asarray(q) - self.destination)) < self.config.d_tol

    def normalize(self, q) -> np.ndarray:
        """Map positions to [-1, 1]^2 over the footprint."""
        return 2.0 * (np.asarray(q, dtype=float) - self.lo) / (self.hi - self.lo) - 1.0

    def node(self, q) -> tuple[int, int]:
        return self.sir_map.geometry.node_of(q)

    def sir(self, q) -> float:
        """Uncapped best-association SIR (linear) at ``q``."""
        return self.sir_map.at(self.node(q))

    def association(self, q) -> int:
        return int(self.sir_map.association[self.node(q)])

    def classify(self, q, steps_taken: int) -> Terminal:
        if self.at_destination(q):
            return Terminal.DESTINATION
        if not self.inside(q):
            return Terminal.OUT_OF_BOUNDS
        if steps_taken >= self.config.max_steps:
            return Terminal.STEP_CAP
        return Terminal.NONE

    def reward_at(self, q) -> float:
        """``-1 + mu * min(SIR, cap)``; positions outside the map earn ``-1``."""
        if not self.inside(q):
            return -1.0
        sir = min(self.sir(q), self.config.sir_cap)
        reward = -1.0 + self.config.mu * sir
        if self.config.sir_violation_penalty and 10.0 * math.log10(sir) < self.config.sir_min_db:
            reward -= self.config.sir_violation_penalty
        return reward

    # dynamics
    def reset(self, rng: np.random.Generator | None = None, start=None) -> np.ndarray:
        """Start position: ``start``, the configured start, or a uniform random node.

        Random starts are drawn uniformly over lattice nodes, rejecting nodes
        within ``d_tol`` of the destination.
        """
        if start is None:
            start = self.config.start
        if start is not None:
            return np.asarray(start, dtype=float)
        if rng is None:
            raise ConfigurationError("random reset needs a generator")
        geo = self.sir_map.geometry
        while True:
            node = (int(rng.integers(geo.nx)), int(rng.integers(geo.ny)))
            q = geo.position_of(node)
            if not self.at_destination(q):
                return q

    def step(self, state, action: int, steps_taken: int = 0) -> StepOutcome:
        """Apply ``action`` from ``state``; ``steps_taken`` counts moves before this one."""
        q = np.asarray(state, dtype=float) + self.config.step_length * ACTIONS[action]
        terminal = self.classify(q, steps_taken + 1)
        if self.inside(q):
            sir_db = 10.0 * math.log10(self.sir(q))
            assoc = self.association(q)
        else:
            sir_db, assoc = float("nan"), -1
        return StepOutcome(q, self.reward_at(q), terminal, sir_db, assoc)

    # baselines and metrics
    def shortest_path_baseline(self, start) -> list[np.ndarray]:
        """Greedy Manhattan walk to the destination: x first, then y."""
        q = np.asarray(start, dtype=float)
        path = [q.copy()]
        h = self.config.step_length
        for axis in (0, 1):
            while True:
                if self.at_destination(q):
                    return path
                gap = self.destination[axis] - q[axis]
                if abs(gap) < h / 2:
                    break
                q = q.copy()
                q[axis] += math.copysign(h, gap)
                path.append(q)
        return path

    def evaluate_path(self, path) -> PathMetrics:
        """Metrics over the visited nodes after the start.

        ``total_sir`` and ``objective = -N + mu * total_sir`` use uncapped SIR.
        """
        nodes = [np.asarray(q) for q in path[1:]]
        n = len(nodes)
        if n == 0:
            reached = bool(path) and self.at_destination(path[0])
            return PathMetrics(0, 0.0, 0.0, float("nan"), 0, 0.0, reached)
        sirs = np.array([self.sir(q) if self.inside(q) else 0.0 for q in nodes])
        with np.errstate(divide="ignore"):
            sir_db = 10.0 * np.log10(sirs)
        total = float(sirs.sum())
        return PathMetrics(
            length=n,
            total_sir=total,
            mean_sir=total / n,
            min_sir_db=float(sir_db.min()),
            violations=int(np.sum(sir_db < self.config.sir_min_db)),
            objective=-n + self.config.mu * total,
            reached=self.at_destination(nodes[-1]),
        )
