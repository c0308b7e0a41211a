"""Single denoising autoencoder: masking corruption, tied-weight
encode/decode, and reconstruction training.

The decoder weight matrix is never stored; the decoder layer is built
around a transpose *view* of the encoder weights, so the tied-weight
constraint holds exactly at every step by construction. The loss is
always computed against the clean input, never the corrupted copy.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, NumericError, TimeBudgetExceeded
from .linalg import Rng, derive_seed
from .nn import (
    ActivationKind,
    DenseLayer,
    Loss,
    SgdConfig,
    affine_forward,
    backprop,
    init_dense_layer,
    shuffled_batches,
)


@dataclass(frozen=True)
class CorruptionSpec:
    """Masking noise: each input component is zeroed with probability
    `level`, independently, resampled every epoch."""

    level: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.level <= 1.0:
            raise ValueError(f"corruption level must be in [0, 1], got {self.level}")


def corrupt(x: np.ndarray, spec: CorruptionSpec, rng: Rng) -> np.ndarray:
    """Zero each component with probability spec.level; survivors are
    passed through unchanged. Deterministic given the rng state."""
    if spec.level == 0.0:
        return x.copy()
    mask = rng.uniform(0.0, 1.0, size=x.shape) >= spec.level
    return x * mask


# Reconstruction regime keyed by decoder activation: sigmoid decoders
# pair with cross-entropy (targets in [0,1]), linear decoders with
# squared error (unbounded targets such as tanh or relu codes).
_DECODER_LOSS = {
    ActivationKind.SIGMOID: Loss.RECON_CROSS_ENTROPY,
    ActivationKind.LINEAR: Loss.RECON_SQUARED_ERROR,
}


def decoder_activation_for(target_activation: ActivationKind | None) -> ActivationKind:
    """Decoder activation for reconstructing the outputs of
    `target_activation` (None means raw inputs in [0,1])."""
    if target_activation in (None, ActivationKind.SIGMOID):
        return ActivationKind.SIGMOID
    return ActivationKind.LINEAR


class DenoisingAutoencoder:
    """Tied-weight denoising autoencoder.

    encoder maps d -> d_hidden; the decoder reuses the transposed
    encoder weights with its own bias, mapping the code back to d.
    """

    def __init__(
        self,
        encoder: DenseLayer,
        decoder_bias: np.ndarray,
        decoder_activation: ActivationKind,
        corruption: CorruptionSpec,
    ):
        if decoder_bias.shape[0] != encoder.in_dim:
            raise ContractError(
                f"decoder bias length {decoder_bias.shape[0]} must equal "
                f"encoder input dimension {encoder.in_dim}"
            )
        if decoder_activation not in _DECODER_LOSS:
            raise ContractError(
                f"decoder activation must be sigmoid or linear, got {decoder_activation.value}"
            )
        self.encoder = encoder
        self.decoder_bias = np.asarray(decoder_bias, dtype=np.float64)
        self.decoder_activation = decoder_activation
        self.corruption = corruption

    @property
    def n_visible(self) -> int:
        return self.encoder.in_dim

    @property
    def n_hidden(self) -> int:
        return self.encoder.out_dim

    def decoder(self) -> DenseLayer:
        """Decoder layer over a transpose view of the encoder weights
        (same storage, so the tie can never drift)."""
        return DenseLayer(self.encoder.weights.T, self.decoder_bias, self.decoder_activation)

    @property
    def reconstruction_loss(self) -> Loss:
        return _DECODER_LOSS[self.decoder_activation]


def init_denoising_autoencoder(
    n_visible: int,
    n_hidden: int,
    encoder_activation: ActivationKind,
    decoder_activation: ActivationKind,
    corruption: CorruptionSpec,
    rng: Rng,
) -> DenoisingAutoencoder:
    encoder = init_dense_layer(n_visible, n_hidden, encoder_activation, rng)
    return DenoisingAutoencoder(encoder, np.zeros(n_visible), decoder_activation, corruption)


def da_forward(da: DenoisingAutoencoder, x_tilde: np.ndarray):
    """Code and reconstruction for a (possibly corrupted) input or batch."""
    _, y = affine_forward(da.encoder, x_tilde)
    _, z = affine_forward(da.decoder(), y)
    return y, z


def da_encode(da: DenoisingAutoencoder, x: np.ndarray) -> np.ndarray:
    """Clean encoder output (no corruption applied)."""
    _, y = affine_forward(da.encoder, x)
    return y


def da_backprop(da: DenoisingAutoencoder, x_tilde: np.ndarray, x_clean: np.ndarray):
    """Tied-weight gradients, summed over the batch.

    The encoder weight gradient is the encoder-path gradient plus the
    transpose of the decoder-path gradient, because both paths flow into
    the same storage.

    Returns (dW, db, db_dec, loss).
    """
    grads, loss = backprop(
        [da.encoder, da.decoder()], x_tilde, x_clean, da.reconstruction_loss
    )
    (dW_enc, db), (dW_dec, db_dec) = grads
    return dW_enc + dW_dec.T, db, db_dec, loss


def train_da(
    da: DenoisingAutoencoder,
    inputs: np.ndarray,
    cfg: SgdConfig,
    deadline: float | None = None,
) -> tuple[DenoisingAutoencoder, list[float]]:
    """Minibatch SGD on the denoising reconstruction objective.

    Per step: corrupt the batch, run the corrupted copy forward, take
    the loss against the *clean* batch, backpropagate through decoder
    and encoder (tied), and update in place. Corruption masks and the
    shuffle order are resampled each epoch from seeds derived off
    cfg.seed and da.corruption.seed, so runs are reproducible.

    Returns the (mutated) autoencoder and the per-epoch mean loss trace.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    if da.reconstruction_loss is Loss.RECON_CROSS_ENTROPY:
        if inputs.min() < 0.0 or inputs.max() > 1.0:
            raise ContractError(
                "cross-entropy reconstruction requires inputs in [0, 1]; "
                "use a linear decoder for unbounded targets"
            )
    n = inputs.shape[0]
    trace = []
    for epoch in range(cfg.epochs):
        if deadline is not None and time.perf_counter() > deadline:
            raise TimeBudgetExceeded(f"wall-time budget hit at epoch {epoch}")
        shuffle_rng = Rng(derive_seed(cfg.seed, "shuffle", epoch))
        noise_rng = Rng(derive_seed(da.corruption.seed, "mask", epoch))
        epoch_loss = 0.0
        for batch_no, idx in enumerate(shuffled_batches(n, cfg.batch_size, shuffle_rng)):
            x = inputs[idx]
            x_tilde = corrupt(x, da.corruption, noise_rng)
            dW, db, db_dec, loss = da_backprop(da, x_tilde, x)
            if not np.isfinite(loss):
                raise NumericError(
                    f"non-finite reconstruction loss at epoch {epoch}, batch {batch_no}"
                )
            scale = cfg.learning_rate / idx.shape[0]
            da.encoder.weights -= scale * dW
            da.encoder.bias -= scale * db
            da.decoder_bias -= scale * db_dec
            epoch_loss += loss
        trace.append(epoch_loss / n)
    return da, trace
