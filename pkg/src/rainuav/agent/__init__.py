"""Dueling double-DQN agent with multi-step returns."""

from .checkpoint import Checkpoint, load_checkpoint, read_training_log, save_checkpoint, write_training_log
from .dqn import (
    EpisodeRecord,
    TrainConfig,
    TrainResult,
    Trajectory,
    ddqn_targets,
    plan,
    select_action,
    train,
    train_step,
)
from .memory import Batch, NStepTransition, NStepWindow, ReplayMemory, n_step_return
from .network import Adam, NetworkParams, backward, forward, td_loss_and_grad

__all__ = [
    "Adam",
    "Batch",
    "Checkpoint",
    "EpisodeRecord",
    "NStepTransition",
    "NStepWindow",
    "NetworkParams",
    "ReplayMemory",
    "TrainConfig",
    "TrainResult",
    "Trajectory",
    "backward",
    "ddqn_targets",
    "forward",
    "load_checkpoint",
    "n_step_return",
    "plan",
    "read_training_log",
    "save_checkpoint",
    "select_action",
    "td_loss_and_grad",
    "train",
    "train_step",
    "write_training_log",
]
