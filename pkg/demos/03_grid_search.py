"""Deterministic grid search over activation, depth and width.

Every cell gets a seed derived from the base seed and the cell's
identity, so the ledger is reproducible cell by cell and identical
regardless of worker count. The script runs a small grid on bars,
prints the ledger, re-runs one cell standalone to show it reproduces,
and projects the ledger onto an activation x depth error matrix.

Run from the repository root:  python3 demos/03_grid_search.py
"""

from sdanet.datasets import bars
from sdanet.nn import ActivationKind, SgdConfig
from sdanet.sda import FinetuneConfig
from sdanet.search import (
    Cell,
    GridSpec,
    activation_depth_table,
    cells_of,
    run_cell,
    run_grid,
    select_best,
)


def main():
    ds = bars(seed=1)
    grid = GridSpec(
        activations=(ActivationKind.SIGMOID, ActivationKind.TANH, ActivationKind.RELU),
        layer_counts=(1, 2),
        neuron_counts=(8,),
        base_seed=3,
        pretrain_cfg=SgdConfig(0.1, 20, 5, seed=0),
        finetune_cfg=FinetuneConfig(SgdConfig(0.1, 20, 10, seed=0)),
    )
    print(f"running {len(cells_of(grid))} cells serially...")
    ledger = run_grid(grid, ds, workers=1)

    print(f"\n{'cell':<28} {'status':<8} {'valid %':>8} {'epochs':>7}")
    for t in ledger:
        cell = f"{t.activation.value}/{t.n_layers}x{t.n_neurons}"
        print(f"{cell:<28} {t.status:<8} {t.validation_error_pct:8.2f} {t.epochs_ran:7d}")

    best = select_best(ledger)
    print(f"\nbest cell: {best.activation.value}/{best.n_layers}x{best.n_neurons} "
          f"at {best.validation_error_pct:.2f}% validation error")

    # any ledger row reproduces in isolation: same cell, same result
    redo = run_cell(grid, Cell(best.activation, best.n_layers, best.n_neurons,
                               best.corruption_level, best.corruption_mode), ds)
    print(f"standalone re-run of that cell: {redo.validation_error_pct:.2f}% "
          f"(identical: {redo.validation_error_pct == best.validation_error_pct})")

    table = activation_depth_table(ledger)
    print("\nvalidation error (%) by activation and depth:")
    header = "            " + "".join(f"{n:>10}L" for n in table.layer_counts)
    print(header)
    for i, act in enumerate(table.activations):
        row = "".join(f"{table.errors[i, j]:>11.2f}" for j in range(len(table.layer_counts)))
        print(f"{act.value:<12}{row}")


if __name__ == "__main__":
    main()
