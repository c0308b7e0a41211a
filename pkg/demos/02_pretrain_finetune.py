"""The full pipeline: greedy pre-training, unrolling, fine-tuning.

Uses a small synthetic digit corpus (digit scans placed on a 28x28
canvas with random position, scale and noise) so everything runs in
seconds on a CPU. A pre-trained two-layer net is compared with an
identically shaped randomly initialized one under the same short
fine-tuning budget.

Run from the repository root:  python3 demos/02_pretrain_finetune.py
"""

from sdanet.autoencoder import CorruptionSpec
from sdanet.data import Split
from sdanet.datasets import synthetic_digits
from sdanet.linalg import Rng, derive_seed
from sdanet.nn import ActivationKind, SgdConfig
from sdanet.sda import (
    FinetuneConfig,
    StackSpec,
    build_random_net,
    evaluate,
    finetune,
    pretrain,
    unroll,
)

SEED = 0


def main():
    ds = synthetic_digits(n_samples=3500, seed=SEED)
    train = ds.subset(Split.TRAIN)
    valid = ds.subset(Split.VALID)
    print(f"digits: {train[0].shape[0]} train / {valid[0].shape[0]} valid, "
          f"{ds.d} pixels, {ds.n_classes} classes")

    spec = StackSpec(
        input_dim=ds.d,
        hidden_dims=(100, 100),
        hidden_activation=ActivationKind.SIGMOID,
        n_classes=ds.n_classes,
        corruption=CorruptionSpec(0.3, derive_seed(SEED, "corrupt")),
    )

    print("\npre-training one denoising autoencoder per hidden layer...")
    traces: list = []
    das = pretrain(spec, train[0], SgdConfig(0.01, 20, 10, seed=SEED), loss_out=traces)
    for k, trace in enumerate(traces):
        print(f"  layer {k + 1}: loss {trace[0]:.2f} -> {trace[-1]:.2f}")

    # short supervised budget; the snapshot with the best validation
    # error is restored at the end
    fine_cfg = FinetuneConfig(SgdConfig(0.1, 20, 25, seed=derive_seed(SEED, "fine")))

    net = unroll(das, spec, Rng(derive_seed(SEED, "unroll")))
    net, history = finetune(net, train, valid, fine_cfg)
    pre_err, _ = evaluate(net, *valid)

    rand = build_random_net(spec, Rng(derive_seed(SEED, "rand")))
    rand, _ = finetune(rand, train, valid, fine_cfg)
    rand_err, _ = evaluate(rand, *valid)

    print(f"\nvalidation error after {history.epochs_ran} fine-tune epochs:")
    print(f"  pre-trained init: {100 * pre_err:.2f}%")
    print(f"  random init:      {100 * rand_err:.2f}%")


if __name__ == "__main__":
    main()
