"""N-step transitions, the sliding window that builds them, and replay memory."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..env import Terminal


@dataclass(frozen=True)
class NStepTransition:
    """``(s_n, a_n, R_{n:n+k}, s_{n+k}, tag)`` with ``k = n_steps``.

    ``k`` equals the window length except for windows truncated by the end of
    an episode. States are network inputs (normalized positions).
    """

    state: np.ndarray
    action: int
    ret: float
    successor: np.ndarray
    terminal: Terminal
    n_steps: int


def n_step_return(rewards, gamma: float, n1: int) -> float:
    """Discounted sum of the first ``n1`` rewards of the window."""
    if n1 < 1 or len(rewards) < n1:
        raise ValueError(f"window holds {len(rewards)} rewards, need {n1}")
    total = 0.0
    for i in range(n1):
        total += gamma**i * rewards[i]
    return total


class NStepWindow:
    """Sliding window of the latest ``n1`` one-step transitions of an episode."""

    def __init__(self, n1: int, gamma: float):
        if n1 < 1:
            raise ValueError("window length must be at least 1")
        self.n1 = n1
        self.gamma = gamma
        self._items: deque = deque()

    def __len__(self) -> int:
        return len(self._items)

    def push(self, state, action, reward, successor, terminal=Terminal.NONE) -> list[NStepTransition]:
        """Add a step; returns the transitions that became complete.

        When ``terminal`` is not ``NONE`` the window is flushed and the
        remaining heads are emitted with truncated returns.
        """
        self._items.append((np.asarray(state), int(action), float(reward)))
        out = []
        if len(self._items) == self.n1:
            out.append(self._emit(successor, terminal))
        if terminal != Terminal.NONE:
            while self._items:
                out.append(self._emit(successor, terminal))
        return out

    def _emit(self, successor, terminal) -> NStepTransition:
        rewards = [r for _, _, r in self._items]
        state, action, _ = self._items.popleft()
        k = len(rewards)
        return NStepTransition(state, action, n_step_return(rewards, self.gamma, k), np.asarray(successor), Terminal(terminal), k)


@dataclass
class Batch:
    states: np.ndarray
    actions: np.ndarray
    returns: np.ndarray
    successors: np.ndarray
    terminals: np.ndarray
    n_steps: np.ndarray

    def __len__(self) -> int:
        return len(self.actions)

    @classmethod
    def from_transitions(cls, transitions) -> "Batch":
        return cls(
            np.array([t.state for t in transitions], dtype=float),
            np.array([t.action for t in transitions], dtype=int),
            np.array([t.ret for t in transitions], dtype=float),
            np.array([t.successor for t in transitions], dtype=float),
            np.array([int(t.terminal) for t in transitions], dtype=int),
            np.array([t.n_steps for t in transitions], dtype=int),
        )


class ReplayMemory:
    """Fixed-capacity FIFO ring of transitions with uniform minibatch sampling."""

    def __init__(self, capacity: int, state_dim: int = 2):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._states = np.zeros((capacity, state_dim))
        self._actions = np.zeros(capacity, dtype=int)
        self._returns = np.zeros(capacity)
        self._successors = np.zeros((capacity, state_dim))
        self._terminals = np.zeros(capacity, dtype=int)
        self._n_steps = np.zeros(capacity, dtype=int)
        self._next = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def push(self, t: NStepTransition) -> None:
        i = self._next
        self._states[i] = t.state
        self._actions[i] = t.action
        self._returns[i] = t.ret
        self._successors[i] = t.successor
        self._terminals[i] = int(t.terminal)
        self._n_steps[i] = t.n_steps
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def _order(self) -> np.ndarray:
        start = (self._next - self._size) % self.capacity
        return (start + np.arange(self._size)) % self.capacity

    def _gather(self, idx) -> Batch:
        return Batch(
            self._states[idx], self._actions[idx], self._returns[idx],
            self._successors[idx], self._terminals[idx], self._n_steps[idx],
        )

    def contents(self) -> Batch:
        """Everything stored, oldest first."""
        return self._gather(self._order())

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        """Uniform sample without replacement."""
        if batch_size > self._size:
            raise ValueError(f"cannot sample {batch_size} from {self._size} transitions")
        return self._gather(rng.choice(self._size, size=batch_size, replace=False))
