"""Dueling Q-network in plain numpy with hand-written backpropagation.

A ReLU trunk feeds two linear heads: a scalar state value ``V`` and per-action
advantages ``A``. They are combined as ``Q = V + A - mean(A)``.
"""

from __future__ import annotations

import numpy as np

from ..errors import NumericalError


class NetworkParams:
    """Trunk weights/biases plus value and advantage heads.

    All arrays are views into one contiguous vector ``flat`` in the order
    returned by ``arrays()``: trunk ``(w, b)`` pairs, value ``(w, b)``,
    advantage ``(w, b)``.
    """

    def __init__(self, flat: np.ndarray, shapes):
        self.shapes = [tuple(int(n) for n in sh) for sh in shapes]
        sizes = [int(np.prod(sh)) for sh in self.shapes]
        if flat.ndim != 1 or flat.size != sum(sizes):
            raise ValueError(f"flat vector of size {flat.size} does not match layer shapes {self.shapes}")
        self.flat = flat
        self._views = []
        offset = 0
        for sh, n in zip(self.shapes, sizes):
            self._views.append(flat[offset : offset + n].reshape(sh))
            offset += n
        n_trunk = (len(self._views) - 4) // 2
        self.weights = self._views[0 : 2 * n_trunk : 2]
        self.biases = self._views[1 : 2 * n_trunk : 2]
        self.value_w, self.value_b, self.adv_w, self.adv_b = self._views[2 * n_trunk :]

    @staticmethod
    def layer_shapes(n_inputs: int = 2, hidden=(64, 64), n_actions: int = 4) -> list[tuple[int, ...]]:
        sizes = [n_inputs, *hidden]
        shapes = []
        for a, b in zip(sizes[:-1], sizes[1:]):
            shapes += [(a, b), (b,)]
        h = sizes[-1]
        return shapes + [(h, 1), (1,), (h, n_actions), (n_actions,)]

    @classmethod
    def from_arrays(cls, arrays) -> "NetworkParams":
        arrays = [np.asarray(a, dtype=float) for a in arrays]
        return cls(np.concatenate([a.ravel() for a in arrays]), [a.shape for a in arrays])

    @classmethod
    def init(cls, rng: np.random.Generator, n_inputs: int = 2, hidden=(64, 64), n_actions: int = 4):
        """He-normal trunk, unit-fan-in-variance heads, zero biases."""
        shapes = cls.layer_shapes(n_inputs, hidden, n_actions)
        n_trunk = len(shapes) - 4
        arrays = []
        for i, sh in enumerate(shapes):
            if len(sh) == 1:
                arrays.append(np.zeros(sh))
            else:
                gain = 2.0 if i < n_trunk else 1.0
                arrays.append(rng.normal(0.0, np.sqrt(gain / sh[0]), sh))
        return cls.from_arrays(arrays)

    def arrays(self) -> list[np.ndarray]:
        return list(self._views)

    def copy(self) -> "NetworkParams":
        return NetworkParams(self.flat.copy(), self.shapes)

    def zeros_like(self) -> "NetworkParams":
        return NetworkParams(np.zeros_like(self.flat), self.shapes)

    @property
    def n_actions(self) -> int:
        return self.adv_b.size

    @property
    def hidden(self) -> tuple[int, ...]:
        return tuple(b.size for b in self.biases)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.flat)))


def forward(params: NetworkParams, states, cache: bool = False):
    """Action values for ``states`` of shape ``(B, n_inputs)`` or ``(n_inputs,)``."""
    if not params.is_finite():
        raise NumericalError("non-finite network parameter")
    x = np.asarray(states, dtype=float)
    single = x.ndim == 1
    h = x[None] if single else x
    acts = [h]
    for w, b in zip(params.weights, params.biases):
        h = np.maximum(h @ w + b, 0.0)
        acts.append(h)
    v = h @ params.value_w + params.value_b
    a = h @ params.adv_w + params.adv_b
    q = v + a - a.mean(axis=1, keepdims=True)
    if single:
        q = q[0]
    return (q, acts) if cache else q


def backward(params: NetworkParams, acts, grad_q) -> NetworkParams:
    """Gradient of a scalar loss w.r.t. every parameter, given ``dL/dQ``."""
    grad_q = np.atleast_2d(grad_q)
    h = acts[-1]
    grad_v = grad_q.sum(axis=1, keepdims=True)
    grad_a = grad_q - grad_q.mean(axis=1, keepdims=True)
    g_value_w = h.T @ grad_v
    g_value_b = grad_v.sum(axis=0)
    g_adv_w = h.T @ grad_a
    g_adv_b = grad_a.sum(axis=0)
    grad_h = grad_v @ params.value_w.T + grad_a @ params.adv_w.T
    g_w = [None] * len(params.weights)
    g_b = [None] * len(params.weights)
    for i in range(len(params.weights) - 1, -1, -1):
        grad_pre = grad_h * (acts[i + 1] > 0)
        g_w[i] = acts[i].T @ grad_pre
        g_b[i] = grad_pre.sum(axis=0)
        if i:
            grad_h = grad_pre @ params.weights[i].T
    arrays = []
    for w, b in zip(g_w, g_b):
        arrays += [w, b]
    return NetworkParams.from_arrays(arrays + [g_value_w, g_value_b, g_adv_w, g_adv_b])


def td_loss_and_grad(params: NetworkParams, states, actions, targets):
    """Mean squared error between ``Q(s, a)`` and frozen ``targets`` plus its gradient."""
    q, acts = forward(params, states, cache=True)
    actions = np.asarray(actions, dtype=int)
    rows = np.arange(len(actions))
    diff = q[rows, actions] - np.asarray(targets, dtype=float)
    loss = float(np.mean(diff**2))
    grad_q = np.zeros_like(q)
    grad_q[rows, actions] = 2.0 * diff / len(actions)
    return loss, backward(params, acts, grad_q)


class Adam:
    """Adaptive first/second-moment gradient scaling."""

    def __init__(self, learning_rate: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = None
        self.v = None

    def step(self, params: NetworkParams, grads: NetworkParams) -> None:
        """Update ``params`` in place."""
        g = grads.flat
        if self.m is None:
            self.m = np.zeros_like(params.flat)
            self.v = np.zeros_like(params.flat)
        self.t += 1
        self.m *= self.beta1
        self.m += (1.0 - self.beta1) * g
        self.v *= self.beta2
        self.v += (1.0 - self.beta2) * g * g
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        params.flat -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)
