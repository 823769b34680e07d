"""Checkpoint files for trained networks and CSV training logs."""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass

import numpy as np

from ..container import read_container, write_container
from ..errors import FormatError
from .dqn import EpisodeRecord, TrainConfig
from .network import NetworkParams

SCHEMA_VERSION = 1
MAGIC = b"RAINUAV-QNET\n"
LOG_COLUMNS = ["episode", "return", "moving_avg_return", "epsilon", "steps"]


def config_digest(config: TrainConfig) -> str:
    return hashlib.sha256(json.dumps(config.to_dict(), sort_keys=True).encode()).hexdigest()


@dataclass(frozen=True)
class Checkpoint:
    params: NetworkParams
    config: TrainConfig
    medium_digest: str
    scenario_digest: str


def save_checkpoint(path, ckpt: Checkpoint) -> None:
    payload = np.ascontiguousarray(ckpt.params.flat, dtype="<f8").tobytes()
    header = {
        "schema_version": SCHEMA_VERSION,
        "dtype": "<f8",
        "layer_shapes": [list(sh) for sh in ckpt.params.shapes],
        "config": ckpt.config.to_dict(),
        "config_digest": config_digest(ckpt.config),
        "medium_digest": ckpt.medium_digest,
        "scenario_digest": ckpt.scenario_digest,
    }
    write_container(path, MAGIC, header, payload)


def load_checkpoint(path) -> Checkpoint:
    """Read a checkpoint; ``FormatError`` on corruption or version mismatch."""
    header, payload = read_container(path, MAGIC, SCHEMA_VERSION, "a network checkpoint")
    try:
        shapes = [tuple(int(n) for n in sh) for sh in header["layer_shapes"]]
        if header["dtype"] != "<f8" or len(payload) != 8 * sum(int(np.prod(sh)) for sh in shapes):
            raise FormatError(f"{path}: payload size does not match layer shapes")
        config = TrainConfig(**header["config"])
        if config_digest(config) != header["config_digest"]:
            raise FormatError(f"{path}: configuration digest mismatch")
        n_actions = shapes[-1][0] if shapes else 0
        expected = NetworkParams.layer_shapes(2, config.hidden, n_actions)
        if shapes != expected:
            raise FormatError(f"{path}: layer shapes {shapes} inconsistent with hidden sizes {config.hidden}")
        flat = np.frombuffer(payload, dtype="<f8").copy()
        return Checkpoint(NetworkParams(flat, shapes), config, header["medium_digest"], header["scenario_digest"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{path}: malformed header ({exc})") from exc


def write_training_log(path, log: list[EpisodeRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(LOG_COLUMNS)
        for r in log:
            w.writerow([r.episode, repr(r.ret), repr(r.moving_avg_return), repr(r.epsilon), r.steps])


def read_training_log(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        {
            "episode": int(r["episode"]),
            "return": float(r["return"]),
            "moving_avg_return": float(r["moving_avg_return"]),
            "epsilon": float(r["epsilon"]),
            "steps": int(r["steps"]),
        }
        for r in rows
    ]
