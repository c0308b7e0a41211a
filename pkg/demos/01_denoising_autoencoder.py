"""A single denoising autoencoder on the bars dataset.

The bars data is the smallest corpus where denoising is visibly useful:
each sample lights exactly one of 8 components, so a 4-unit code must
learn a compact binary-ish encoding, and masking corruption forces it
to fill deleted pixels back in. This script trains one DA and prints
the loss trace plus a few corrupted/reconstructed pairs.

Run from the repository root:  python3 demos/01_denoising_autoencoder.py
"""

import numpy as np

from sdanet.autoencoder import (
    CorruptionSpec,
    corrupt,
    da_forward,
    decoder_activation_for,
    init_denoising_autoencoder,
    train_da,
)
from sdanet.datasets import bars
from sdanet.linalg import Rng
from sdanet.nn import ActivationKind, SgdConfig


def fmt(vec):
    return " ".join(f"{v:4.2f}" for v in vec)


def main():
    ds = bars(seed=1)
    print(f"bars dataset: {ds.n} samples, {ds.d} components, {ds.n_classes} classes")

    # inputs live in [0, 1], so the decoder is a sigmoid trained with
    # cross-entropy against the clean input
    da = init_denoising_autoencoder(
        n_visible=8,
        n_hidden=4,
        encoder_activation=ActivationKind.SIGMOID,
        decoder_activation=decoder_activation_for(None),
        corruption=CorruptionSpec(level=0.3, seed=13),
        rng=Rng(5),
    )
    da, trace = train_da(da, ds.samples, SgdConfig(0.1, 20, 100, seed=9))

    print("\nmean reconstruction loss:")
    for epoch in (0, 9, 49, 99):
        print(f"  epoch {epoch + 1:3d}: {trace[epoch]:.4f}")
    print(f"  reduction: {100 * (1 - trace[-1] / trace[0]):.1f}%")

    print("\nclean input / corrupted copy / reconstruction:")
    noise = Rng(21)
    for i in (0, 3, 6):
        x = ds.samples[i]
        x_tilde = corrupt(x[None, :], da.corruption, noise)[0]
        _, z = da_forward(da, x_tilde)
        print(f"  x      {fmt(x)}")
        print(f"  x~     {fmt(x_tilde)}")
        print(f"  recon  {fmt(np.ravel(z))}")
        print()


if __name__ == "__main__":
    main()
