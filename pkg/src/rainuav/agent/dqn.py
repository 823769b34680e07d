"""Epsilon-greedy action selection, double-Q targets and the training loop."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..env import N_ACTIONS, EpisodeConfig, Terminal, TrajectoryEnv
from ..errors import ConfigurationError, NumericalError
from .memory import Batch, NStepWindow, ReplayMemory
from .network import Adam, NetworkParams, forward, td_loss_and_grad


@dataclass(frozen=True)
class TrainConfig:
    episodes: int = 3000
    max_steps: int = 300
    update_every: int = 5  # environment steps between target syncs
    d_tol: float = 10.0
    epsilon0: float = 0.5
    epsilon_decay: float = 0.998
    r_des: float = 2000.0
    p_ob: float = 10000.0
    mu: float = 10.0 / 43.0
    capacity: int = 100_000
    batch_size: int = 16
    gamma: float = 0.99
    n_step: int = 3
    learning_rate: float = 1e-3
    hidden: tuple[int, ...] = (64, 64)
    seed: int = 0
    log_window: int = 100
    reward_scale: float = 1.0  # multiplies every reward and bonus inside the learner only

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        checks = [
            (0.0 <= self.epsilon0 <= 1.0, "epsilon0 must lie in [0, 1]"),
            (0.0 < self.epsilon_decay <= 1.0, "epsilon_decay must lie in (0, 1]"),
            (0.0 < self.gamma <= 1.0, "gamma must lie in (0, 1]"),
            (self.n_step >= 1, "n_step must be at least 1"),
            (self.episodes >= 0, "episodes must be non-negative"),
            (self.max_steps >= 1, "max_steps must be at least 1"),
            (self.update_every >= 1, "update_every must be at least 1"),
            (self.batch_size >= 1, "batch_size must be at least 1"),
            (self.capacity >= self.batch_size, "capacity must be at least batch_size"),
            (self.learning_rate > 0, "learning_rate must be positive"),
            (self.log_window >= 1, "log_window must be at least 1"),
            (len(self.hidden) >= 1 and min(self.hidden) >= 1, "hidden sizes must be positive"),
            (self.d_tol > 0, "d_tol must be positive"),
            (self.mu >= 0, "mu must be non-negative"),
            (self.reward_scale > 0, "reward_scale must be positive"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigurationError(msg)

    def epsilon(self, episode: int) -> float:
        """Exploration rate during ``episode`` (0-based): ``epsilon0 * decay**episode``."""
        return self.epsilon0 * self.epsilon_decay**episode

    def episode_config(self, destination, step_length: float, **extra) -> EpisodeConfig:
        """Environment settings consistent with this configuration."""
        return EpisodeConfig(
            destination=tuple(float(v) for v in destination),
            step_length=step_length,
            d_tol=self.d_tol,
            max_steps=self.max_steps,
            mu=self.mu,
            r_des=self.r_des,
            p_ob=self.p_ob,
            **extra,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d


def select_action(params: NetworkParams, state, epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy choice; greedy ties go to the lowest action index."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    if rng.random() < epsilon:
        return int(rng.integers(params.n_actions))
    return int(np.argmax(forward(params, state)))


def ddqn_targets(batch: Batch, online: NetworkParams, target: NetworkParams, gamma: float, r_des: float, p_ob: float) -> np.ndarray:
    """Learning targets for a minibatch.

    Windows ending at the destination get ``R + r_des``, windows ending out of
    bounds get ``R - p_ob``. All others bootstrap with ``gamma**k`` times the
    target network's value of the online network's greedy successor action.
    """
    y = batch.returns.astype(float).copy()
    dest = batch.terminals == int(Terminal.DESTINATION)
    oob = batch.terminals == int(Terminal.OUT_OF_BOUNDS)
    y[dest] += r_des
    y[oob] -= p_ob
    boot = ~(dest | oob)
    if np.any(boot):
        succ = batch.successors[boot]
        best = np.argmax(forward(online, succ), axis=1)
        q_next = forward(target, succ)[np.arange(len(best)), best]
        y[boot] += gamma ** batch.n_steps[boot] * q_next
    return y


def train_step(batch: Batch, online: NetworkParams, target: NetworkParams, optimizer: Adam, config: TrainConfig) -> float:
    """One gradient step on the mean squared TD error; returns the loss."""
    c = config.reward_scale
    y = ddqn_targets(batch, online, target, config.gamma, c * config.r_des, c * config.p_ob)
    loss, grads = td_loss_and_grad(online, batch.states, batch.actions, y)
    if not math.isfinite(loss):
        raise NumericalError("non-finite training loss")
    optimizer.step(online, grads)
    if not online.is_finite():
        raise NumericalError("non-finite network parameter after update")
    return loss


@dataclass(frozen=True)
class EpisodeRecord:
    episode: int
    ret: float
    moving_avg_return: float
    epsilon: float
    steps: int
    terminal: Terminal


@dataclass
class TrainResult:
    params: NetworkParams
    log: list[EpisodeRecord] = field(default_factory=list)

    @property
    def returns(self) -> np.ndarray:
        return np.array([r.ret for r in self.log])

    @property
    def moving_average(self) -> np.ndarray:
        return np.array([r.moving_avg_return for r in self.log])


def _check_consistent(env: TrajectoryEnv, config: TrainConfig) -> None:
    ec = env.config
    for name in ("d_tol", "max_steps", "mu", "r_des", "p_ob"):
        if getattr(ec, name) != getattr(config, name):
            raise ConfigurationError(
                f"environment {name}={getattr(ec, name)} differs from training {name}={getattr(config, name)}"
            )


def train(env: TrajectoryEnv, config: TrainConfig, progress=None) -> TrainResult:
    """Dueling double-DQN with n-step returns on ``env``.

    Deterministic for a given ``config.seed``. ``progress``, if given, is
    called with every ``EpisodeRecord``.
    """
    _check_consistent(env, config)
    rng = np.random.default_rng(config.seed)
    online = NetworkParams.init(rng, 2, config.hidden, N_ACTIONS)
    target = online.copy()
    optimizer = Adam(config.learning_rate)
    memory = ReplayMemory(config.capacity)
    result = TrainResult(online)
    recent: list[float] = []
    total_steps = 0

    for episode in range(config.episodes):
        epsilon = config.epsilon(episode)
        q = env.reset(rng)
        window = NStepWindow(config.n_step, config.gamma)
        ret, n = 0.0, 0
        tag = env.classify(q, 0)
        while tag == Terminal.NONE:
            s = env.normalize(q)
            a = select_action(online, s, epsilon, rng)
            out = env.step(q, a, n)
            n += 1
            total_steps += 1
            ret += out.reward
            scaled = config.reward_scale * out.reward
            for t in window.push(s, a, scaled, env.normalize(out.state), out.terminal):
                memory.push(t)
            if len(memory) >= config.batch_size:
                train_step(memory.sample(config.batch_size, rng), online, target, optimizer, config)
            if total_steps % config.update_every == 0:
                target = online.copy()
            q, tag = out.state, out.terminal
        if tag == Terminal.DESTINATION:
            ret += config.r_des
        elif tag == Terminal.OUT_OF_BOUNDS:
            ret -= config.p_ob
        recent.append(ret)
        if len(recent) > config.log_window:
            recent.pop(0)
        record = EpisodeRecord(episode, ret, float(np.mean(recent)), epsilon, n, tag)
        result.log.append(record)
        if progress is not None:
            progress(record)
    return result


@dataclass(frozen=True)
class Trajectory:
    positions: np.ndarray  # (N+1, 2), start first
    sir_db: np.ndarray  # per position; NaN outside the map
    association: np.ndarray  # per position; -1 outside the map
    terminal: Terminal

    @property
    def reached(self) -> bool:
        return self.terminal == Terminal.DESTINATION

    @property
    def n_steps(self) -> int:
        return len(self.positions) - 1


def plan(params: NetworkParams, start, env: TrajectoryEnv) -> Trajectory:
    """Greedy rollout from ``start`` until a terminal condition or the step cap."""
    q = np.asarray(start, dtype=float)
    positions = [q]
    n = 0
    tag = env.classify(q, 0)
    while tag == Terminal.NONE:
        a = int(np.argmax(forward(params, env.normalize(q))))
        out = env.step(q, a, n)
        n += 1
        q, tag = out.state, out.terminal
        positions.append(q)
    sir_db, assoc = [], []
    for p in positions:
        if env.inside(p):
            sir_db.append(10.0 * math.log10(env.sir(p)))
            assoc.append(env.association(p))
        else:
            sir_db.append(float("nan"))
            assoc.append(-1)
    return Trajectory(np.array(positions), np.array(sir_db), np.array(assoc, dtype=int), tag)
