"""Activations, losses, dense layers, backpropagation and SGD updates.

Every function takes either a single sample (1-d array) or a batch with
samples as rows (2-d array); activations and losses broadcast over rows.
Gradients returned by `backprop` are summed over the rows of the batch,
so a duplicated sample contributes twice. Training loops divide by the
batch size before stepping.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import expit

from .errors import ContractError, ShapeError
from .linalg import Rng, require_finite

EPS = 1e-12  # probability clamp; keeps log-losses finite on saturated units


class ActivationKind(Enum):
    SIGMOID = "sigmoid"
    TANH = "tanh"
    RELU = "relu"
    SOFTMAX = "softmax"
    LINEAR = "linear"

    @classmethod
    def parse(cls, name: str) -> "ActivationKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown activation '{name}' (valid: {valid})") from None


class Loss(Enum):
    SOFTMAX_NLL = "softmax_nll"
    RECON_CROSS_ENTROPY = "recon_cross_entropy"
    RECON_SQUARED_ERROR = "recon_squared_error"


# Final-layer activation each loss is fused with.
_LOSS_ACTIVATION = {
    Loss.SOFTMAX_NLL: ActivationKind.SOFTMAX,
    Loss.RECON_CROSS_ENTROPY: ActivationKind.SIGMOID,
    Loss.RECON_SQUARED_ERROR: ActivationKind.LINEAR,
}


def activate(kind: ActivationKind, pre: np.ndarray) -> np.ndarray:
    """Elementwise activation; softmax normalizes over the last axis."""
    if kind is ActivationKind.SIGMOID:
        return expit(pre)
    if kind is ActivationKind.TANH:
        return np.tanh(pre)
    if kind is ActivationKind.RELU:
        return np.maximum(pre, 0.0)
    if kind is ActivationKind.LINEAR:
        return np.asarray(pre, dtype=np.float64)
    if kind is ActivationKind.SOFTMAX:
        shifted = pre - np.max(pre, axis=-1, keepdims=True)
        e = np.exp(shifted)
        return e / np.sum(e, axis=-1, keepdims=True)
    raise ValueError(f"unknown activation kind {kind!r}")


def activate_grad(kind: ActivationKind, out: np.ndarray) -> np.ndarray:
    """Derivative expressed through the activation *output*.

    Softmax is rejected: its gradient is fused with the NLL loss in
    `backprop` (output delta = probs - one_hot), never formed here.
    """
    if kind is ActivationKind.SIGMOID:
        return out * (1.0 - out)
    if kind is ActivationKind.TANH:
        return 1.0 - out * out
    if kind is ActivationKind.RELU:
        # subgradient at the kink is 0
        return (out > 0).astype(np.float64)
    if kind is ActivationKind.LINEAR:
        return np.ones_like(out)
    if kind is ActivationKind.SOFTMAX:
        raise ContractError(
            "softmax has no standalone elementwise derivative; "
            "use the fused softmax-NLL delta in backprop"
        )
    raise ValueError(f"unknown activation kind {kind!r}")


class DenseLayer:
    """Fully connected layer: out = activation(weights @ x + bias).

    weights has shape (out_dim, in_dim); bias has length out_dim.
    Arrays are stored by reference so tied views remain tied.
    """

    def __init__(self, weights: np.ndarray, bias: np.ndarray, activation: ActivationKind):
        weights = np.asarray(weights, dtype=np.float64)
        bias = np.asarray(bias, dtype=np.float64)
        if weights.ndim != 2 or bias.ndim != 1:
            raise ShapeError("weights must be 2-d and bias 1-d")
        if weights.shape[0] != bias.shape[0]:
            raise ShapeError(
                f"weights rows ({weights.shape[0]}) != bias length ({bias.shape[0]})"
            )
        require_finite(weights, "layer weights")
        require_finite(bias, "layer bias")
        self.weights = weights
        self.bias = bias
        self.activation = activation

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]

    def copy(self) -> "DenseLayer":
        return DenseLayer(self.weights.copy(), self.bias.copy(), self.activation)


def init_dense_layer(n_in: int, n_out: int, activation: ActivationKind, rng: Rng) -> DenseLayer:
    """Seeded uniform init.

    Sigmoid layers draw from +-4*sqrt(6/(fan_in+fan_out)); everything
    else from +-sqrt(6/(fan_in+fan_out)). Biases start at zero.
    """
    limit = np.sqrt(6.0 / (n_in + n_out))
    if activation is ActivationKind.SIGMOID:
        limit *= 4.0
    weights = rng.uniform(-limit, limit, size=(n_out, n_in))
    return DenseLayer(weights, np.zeros(n_out), activation)


@dataclass(frozen=True)
class SgdConfig:
    learning_rate: float
    batch_size: int
    epochs: int
    seed: int

    def __post_init__(self):
        if not self.learning_rate >= 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


def affine_forward(layer: DenseLayer, x: np.ndarray):
    """Pre-activation and activated output for one sample or a batch."""
    if x.shape[-1] != layer.in_dim:
        raise ShapeError(
            f"affine_forward: layer expects {layer.in_dim} inputs, got {x.shape[-1]}"
        )
    pre = x @ layer.weights.T + layer.bias
    return pre, activate(layer.activation, pre)


def forward_pass(layers: list[DenseLayer], x: np.ndarray) -> list[np.ndarray]:
    """Activated outputs of every layer; outs[-1] is the network output."""
    outs = []
    out = x
    for layer in layers:
        _, out = affine_forward(layer, out)
        outs.append(out)
    return outs


def cross_entropy_recon(x: np.ndarray, z: np.ndarray) -> float:
    """Bernoulli cross-entropy between an input in [0,1]^d and its
    reconstruction, summed over components (and over rows for a batch)."""
    if x.shape != z.shape:
        raise ShapeError(f"cross_entropy_recon: shapes differ {x.shape} vs {z.shape}")
    zc = np.clip(z, EPS, 1.0 - EPS)
    return float(-np.sum(x * np.log(zc) + (1.0 - x) * np.log(1.0 - zc)))


def squared_error_recon(x: np.ndarray, z: np.ndarray) -> float:
    """0.5 * ||x - z||^2, summed over components (and rows)."""
    if x.shape != z.shape:
        raise ShapeError(f"squared_error_recon: shapes differ {x.shape} vs {z.shape}")
    d = z - x
    return float(0.5 * np.sum(d * d))


def nll_loss(probs: np.ndarray, label: int) -> float:
    """Negative log-likelihood of `label` under a probability vector."""
    if not 0 <= label < probs.shape[-1]:
        raise ValueError(f"label {label} out of range for {probs.shape[-1]} classes")
    return float(-np.log(max(probs[label], EPS)))


def _batch_loss(loss: Loss, outs: np.ndarray, target) -> float:
    if loss is Loss.SOFTMAX_NLL:
        labels = np.asarray(target, dtype=np.int64)
        picked = np.clip(outs[np.arange(outs.shape[0]), labels], EPS, None)
        return float(-np.sum(np.log(picked)))
    if loss is Loss.RECON_CROSS_ENTROPY:
        return cross_entropy_recon(target, outs)
    return squared_error_recon(target, outs)


def backprop(layers: list[DenseLayer], x: np.ndarray, target, loss: Loss):
    """Gradients of the loss w.r.t. every layer's weights and bias.

    x is one sample (1-d) or a batch with samples as rows; gradients are
    summed over the batch. For SOFTMAX_NLL, `target` is an int label (or
    an array of labels) and the output delta is probs - one_hot(label);
    for the reconstruction losses it is the clean target array.

    Returns (grads, loss_value) where grads is a list of (dW, db)
    matching `layers`.
    """
    final_act = layers[-1].activation
    if _LOSS_ACTIVATION[loss] is not final_act:
        raise ContractError(
            f"loss {loss.value} requires final activation "
            f"{_LOSS_ACTIVATION[loss].value}, got {final_act.value}"
        )
    single = x.ndim == 1
    xb = x[None, :] if single else x
    n = xb.shape[0]

    outs = forward_pass(layers, xb)
    out = outs[-1]

    if loss is Loss.SOFTMAX_NLL:
        labels = np.atleast_1d(np.asarray(target, dtype=np.int64))
        if labels.shape[0] != n:
            raise ShapeError(f"got {labels.shape[0]} labels for {n} samples")
        if labels.min() < 0 or labels.max() >= out.shape[1]:
            raise ValueError("label out of range")
        delta = out.copy()
        delta[np.arange(n), labels] -= 1.0
        loss_value = _batch_loss(loss, out, labels)
    else:
        tgt = np.asarray(target, dtype=np.float64)
        tgt = tgt[None, :] if tgt.ndim == 1 else tgt
        if tgt.shape != out.shape:
            raise ShapeError(f"target shape {tgt.shape} != output shape {out.shape}")
        delta = out - tgt
        loss_value = _batch_loss(loss, out, tgt)

    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(layers)
    for i in range(len(layers) - 1, -1, -1):
        inp = xb if i == 0 else outs[i - 1]
        grads[i] = (delta.T @ inp, delta.sum(axis=0))
        if i > 0:
            delta = (delta @ layers[i].weights) * activate_grad(
                layers[i - 1].activation, outs[i - 1]
            )
    return grads, loss_value


def sgd_step(layers: list[DenseLayer], grads, cfg: SgdConfig) -> None:
    """Plain in-place SGD: p <- p - learning_rate * g. No momentum."""
    if len(grads) != len(layers):
        raise ShapeError(f"got {len(grads)} gradients for {len(layers)} layers")
    for layer, (dW, db) in zip(layers, grads):
        if dW.shape != layer.weights.shape or db.shape != layer.bias.shape:
            raise ShapeError(
                f"gradient shapes {dW.shape}/{db.shape} do not match layer "
                f"{layer.weights.shape}/{layer.bias.shape}"
            )
        layer.weights -= cfg.learning_rate * dW
        layer.bias -= cfg.learning_rate * db


def shuffled_batches(n: int, batch_size: int, rng: Rng) -> list[np.ndarray]:
    """Index arrays covering range(n) once, shuffled; last may be short."""
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    order = rng.permutation(n)
    return [order[i : i + batch_size] for i in range(0, n, batch_size)]
