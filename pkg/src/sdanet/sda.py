"""Greedy layer-wise pre-training, unrolling into a softmax classifier,
and supervised fine-tuning.

Pre-training trains one denoising autoencoder per hidden layer, each on
the clean (uncorrupted) codes of the layers below it. Unrolling copies
the trained encoders verbatim under a freshly initialized softmax output
layer; fine-tuning then runs minibatch SGD on the negative log-likelihood
through all layers jointly, keeping the parameter snapshot with the best
validation error.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .autoencoder import (
    CorruptionSpec,
    DenoisingAutoencoder,
    da_encode,
    decoder_activation_for,
    init_denoising_autoencoder,
    train_da,
)
from .errors import NumericError, ShapeError, TimeBudgetExceeded
from .linalg import Rng, derive_seed
from .nn import (
    ActivationKind,
    DenseLayer,
    Loss,
    SgdConfig,
    backprop,
    forward_pass,
    init_dense_layer,
    sgd_step,
    shuffled_batches,
)

# Defaults for both training phases; all overridable via configuration.
DEFAULT_PRETRAIN_LR = 0.01
DEFAULT_PRETRAIN_EPOCHS = 15
DEFAULT_FINETUNE_LR = 0.1
DEFAULT_FINETUNE_EPOCHS = 200
DEFAULT_PATIENCE = 10
DEFAULT_MIN_DELTA = 1e-4
DEFAULT_BATCH_SIZE = 20
DEFAULT_CORRUPTION_LEVEL = 0.3


class CorruptionMode(Enum):
    # FIRST_LAYER_ONLY corrupts only the raw-input autoencoder; deeper
    # ones train noise-free. EVERY_LAYER has each autoencoder corrupt
    # its own inputs at the stack's level.
    FIRST_LAYER_ONLY = "first_layer_only"
    EVERY_LAYER = "every_layer"

    @classmethod
    def parse(cls, name: str) -> "CorruptionMode":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown corruption mode '{name}' (valid: {valid})") from None


@dataclass(frozen=True)
class StackSpec:
    input_dim: int
    hidden_dims: tuple[int, ...]
    hidden_activation: ActivationKind
    n_classes: int
    corruption: CorruptionSpec
    corruption_mode: CorruptionMode = CorruptionMode.EVERY_LAYER

    def __post_init__(self):
        object.__setattr__(self, "hidden_dims", tuple(int(h) for h in self.hidden_dims))
        if not self.hidden_dims:
            raise ValueError("hidden_dims must be nonempty")
        if any(h < 1 for h in self.hidden_dims):
            raise ValueError(f"hidden dimensions must be positive, got {self.hidden_dims}")
        if self.n_classes < 2:
            raise ValueError(f"n_classes must be >= 2, got {self.n_classes}")
        if self.hidden_activation is ActivationKind.SOFTMAX:
            raise ValueError("softmax is an output-layer activation, not a hidden one")


@dataclass(frozen=True)
class FinetuneConfig:
    sgd: SgdConfig
    patience: int = DEFAULT_PATIENCE
    min_delta: float = DEFAULT_MIN_DELTA

    def __post_init__(self):
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")
        if self.min_delta < 0:
            raise ValueError(f"min_delta must be >= 0, got {self.min_delta}")


class SupervisedNet:
    """Hidden encoder layers topped by one softmax output layer."""

    def __init__(self, layers: list[DenseLayer]):
        if not layers:
            raise ValueError("a supervised net needs at least the output layer")
        if layers[-1].activation is not ActivationKind.SOFTMAX:
            raise ValueError("the final layer must use softmax")
        for hidden in layers[:-1]:
            if hidden.activation is ActivationKind.SOFTMAX:
                raise ValueError("softmax is legal only on the output layer")
        for a, b in zip(layers, layers[1:]):
            if a.out_dim != b.in_dim:
                raise ShapeError(
                    f"layer shapes do not chain: {a.out_dim} outputs feed {b.in_dim} inputs"
                )
        self.layers = layers

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def n_classes(self) -> int:
        return self.layers[-1].out_dim

    def copy(self) -> "SupervisedNet":
        return SupervisedNet([layer.copy() for layer in self.layers])


@dataclass
class FinetuneHistory:
    train_loss: list[float] = field(default_factory=list)
    valid_error: list[float] = field(default_factory=list)
    best_epoch: int = -1

    @property
    def epochs_ran(self) -> int:
        return len(self.valid_error)


def pretrain(
    spec: StackSpec,
    unlabeled: np.ndarray,
    cfg: SgdConfig,
    deadline: float | None = None,
    loss_out: list | None = None,
) -> list[DenoisingAutoencoder]:
    """Train one denoising autoencoder per hidden layer, greedily.

    The first autoencoder trains on the raw inputs; each later one on
    the clean encoder outputs of everything below it. Corruption levels
    follow spec.corruption_mode. Seeds for each layer's init, shuffling
    and masking are derived from cfg.seed and spec.corruption.seed.
    If loss_out is given, each layer's per-epoch mean reconstruction
    loss trace is appended to it.
    """
    inputs = np.asarray(unlabeled, dtype=np.float64)
    if inputs.shape[1] != spec.input_dim:
        raise ShapeError(
            f"pretrain: inputs have dimension {inputs.shape[1]}, spec says {spec.input_dim}"
        )
    das = []
    current = inputs
    target_act = None  # raw inputs in [0,1]
    for k, n_hidden in enumerate(spec.hidden_dims):
        if k == 0 or spec.corruption_mode is CorruptionMode.EVERY_LAYER:
            level = spec.corruption.level
        else:
            level = 0.0
        corruption = CorruptionSpec(level, derive_seed(spec.corruption.seed, "layer", k))
        da = init_denoising_autoencoder(
            current.shape[1],
            n_hidden,
            spec.hidden_activation,
            decoder_activation_for(target_act),
            corruption,
            Rng(derive_seed(cfg.seed, "da-init", k)),
        )
        layer_cfg = replace(cfg, seed=derive_seed(cfg.seed, "da-train", k))
        _, trace = train_da(da, current, layer_cfg, deadline=deadline)
        if loss_out is not None:
            loss_out.append(trace)
        das.append(da)
        current = da_encode(da, current)
        target_act = spec.hidden_activation
    return das


def encode_through(das: list[DenoisingAutoencoder], x: np.ndarray) -> np.ndarray:
    """Compose the stack's clean encoders."""
    for da in das:
        x = da_encode(da, x)
    return x


def unroll(das: list[DenoisingAutoencoder], spec: StackSpec, rng: Rng) -> SupervisedNet:
    """Copy the trained encoders verbatim (decoders discarded) and put a
    freshly initialized softmax layer on top."""
    if len(das) != len(spec.hidden_dims):
        raise ShapeError(f"got {len(das)} autoencoders for {len(spec.hidden_dims)} layers")
    layers = [da.encoder.copy() for da in das]
    layers.append(
        init_dense_layer(spec.hidden_dims[-1], spec.n_classes, ActivationKind.SOFTMAX, rng)
    )
    return SupervisedNet(layers)


def build_random_net(spec: StackSpec, rng: Rng) -> SupervisedNet:
    """Same architecture as unroll would produce, with no pre-training."""
    dims = [spec.input_dim, *spec.hidden_dims]
    layers = [
        init_dense_layer(dims[i], dims[i + 1], spec.hidden_activation, rng)
        for i in range(len(dims) - 1)
    ]
    layers.append(
        init_dense_layer(spec.hidden_dims[-1], spec.n_classes, ActivationKind.SOFTMAX, rng)
    )
    return SupervisedNet(layers)


def predict(net: SupervisedNet, x: np.ndarray) -> np.ndarray:
    """Class probabilities for one sample (or a batch, row-wise)."""
    if x.shape[-1] != net.input_dim:
        raise ShapeError(f"predict: expected {net.input_dim} inputs, got {x.shape[-1]}")
    return forward_pass(net.layers, x)[-1]


def classify(net: SupervisedNet, x: np.ndarray) -> int:
    """Most probable class; ties go to the lowest index."""
    return int(np.argmax(predict(net, x)))


def evaluate(net: SupervisedNet, samples: np.ndarray, labels: np.ndarray):
    """Error rate and confusion counts over a labeled set.

    confusion[i][j] counts true class i predicted as j.
    """
    if samples.shape[0] == 0:
        raise ValueError("cannot evaluate on an empty set")
    probs = predict(net, samples)
    preds = np.argmax(probs, axis=-1)
    k = net.n_classes
    confusion = np.zeros((k, k), dtype=np.int64)
    np.add.at(confusion, (labels, preds), 1)
    error_rate = float(np.mean(preds != labels))
    return error_rate, confusion


def finetune(
    net: SupervisedNet,
    train: tuple[np.ndarray, np.ndarray],
    valid: tuple[np.ndarray, np.ndarray],
    cfg: FinetuneConfig,
    deadline: float | None = None,
) -> tuple[SupervisedNet, FinetuneHistory]:
    """Minibatch SGD on the NLL through all layers, with early stopping.

    Validation error is recorded after every epoch; the best snapshot is
    kept and restored into `net` before returning. Training stops once
    cfg.patience epochs pass without an improvement of more than
    cfg.min_delta over the best error seen, or at the epoch budget.
    """
    train_x, train_y = train
    valid_x, valid_y = valid
    sgd = cfg.sgd
    history = FinetuneHistory()
    best_error = np.inf
    best_params = [(l.weights.copy(), l.bias.copy()) for l in net.layers]
    stale_epochs = 0
    n = train_x.shape[0]
    for epoch in range(sgd.epochs):
        if deadline is not None and time.perf_counter() > deadline:
            raise TimeBudgetExceeded(f"wall-time budget hit at epoch {epoch}")
        shuffle_rng = Rng(derive_seed(sgd.seed, "shuffle", epoch))
        epoch_loss = 0.0
        for batch_no, idx in enumerate(shuffled_batches(n, sgd.batch_size, shuffle_rng)):
            grads, loss = backprop(net.layers, train_x[idx], train_y[idx], Loss.SOFTMAX_NLL)
            if not np.isfinite(loss):
                raise NumericError(
                    f"non-finite training loss at epoch {epoch}, batch {batch_no}"
                )
            scaled = [(dW / idx.shape[0], db / idx.shape[0]) for dW, db in grads]
            sgd_step(net.layers, scaled, sgd)
            epoch_loss += loss
        valid_error, _ = evaluate(net, valid_x, valid_y)
        history.train_loss.append(epoch_loss / n)
        history.valid_error.append(valid_error)
        improvement = best_error - valid_error
        if valid_error < best_error:
            best_error = valid_error
            best_params = [(l.weights.copy(), l.bias.copy()) for l in net.layers]
            history.best_epoch = epoch
        if improvement > cfg.min_delta:
            stale_epochs = 0
        else:
            stale_epochs += 1
            if stale_epochs >= cfg.patience:
                break
    for layer, (w, b) in zip(net.layers, best_params):
        layer.weights = w
        layer.bias = b
    return net, history


def default_pretrain_config(seed: int = 0) -> SgdConfig:
    return SgdConfig(DEFAULT_PRETRAIN_LR, DEFAULT_BATCH_SIZE, DEFAULT_PRETRAIN_EPOCHS, seed)


def default_finetune_config(seed: int = 0) -> FinetuneConfig:
    return FinetuneConfig(
        SgdConfig(DEFAULT_FINETUNE_LR, DEFAULT_BATCH_SIZE, DEFAULT_FINETUNE_EPOCHS, seed)
    )
