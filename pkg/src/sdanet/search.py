"""Deterministic grid search over hidden activation, depth, width and
corruption settings.

Every grid cell runs the full pipeline (pre-train, unroll, fine-tune,
evaluate) with a seed derived by stable hash from the base seed and the
cell identity, so trials are independent, order-insensitive and exactly
reproducible one cell at a time. Cells may run in parallel worker
processes; the ledger is always assembled in canonical cell order and
is bit-identical regardless of the worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import product

import numpy as np

from .autoencoder import CorruptionSpec
from .data import Dataset, Split
from .errors import SdanetError, TimeBudgetExceeded
from .linalg import Rng, derive_seed
from .nn import ActivationKind, SgdConfig
from .sda import (
    CorruptionMode,
    FinetuneConfig,
    StackSpec,
    default_finetune_config,
    default_pretrain_config,
    evaluate,
    finetune,
    pretrain,
    unroll,
)


@dataclass(frozen=True)
class GridSpec:
    """Cross product of cells; training budgets apply to every trial.

    Hidden width is uniform across a cell's layers. Cell order (and the
    ledger order) is the product of the fields below in the order given,
    activations outermost.
    """

    activations: tuple[ActivationKind, ...]
    layer_counts: tuple[int, ...]
    neuron_counts: tuple[int, ...]
    corruption_levels: tuple[float, ...] = (0.3,)
    corruption_modes: tuple[CorruptionMode, ...] = (CorruptionMode.EVERY_LAYER,)
    base_seed: int = 0
    pretrain_cfg: SgdConfig | None = None
    finetune_cfg: FinetuneConfig | None = None
    time_budget_s: float | None = None

    def __post_init__(self):
        for name in ("activations", "layer_counts", "neuron_counts",
                     "corruption_levels", "corruption_modes"):
            if not getattr(self, name):
                raise ValueError(f"grid field '{name}' must be nonempty")
        if any(n < 1 for n in self.layer_counts) or any(n < 1 for n in self.neuron_counts):
            raise ValueError("layer and neuron counts must be positive")


@dataclass(frozen=True)
class Cell:
    activation: ActivationKind
    n_layers: int
    n_neurons: int
    corruption_level: float
    corruption_mode: CorruptionMode

    @property
    def key(self) -> str:
        return (
            f"{self.activation.value}/{self.n_layers}x{self.n_neurons}"
            f"/{self.corruption_level}/{self.corruption_mode.value}"
        )


@dataclass
class TrialResult:
    """One grid cell's outcome. wall_time_s is the only field that is
    not deterministic; report writers keep it out of the ledger files."""

    activation: ActivationKind
    n_layers: int
    n_neurons: int
    corruption_level: float
    corruption_mode: CorruptionMode
    seed: int
    status: str  # "ok" | "failed" | "budget_exceeded"
    validation_error_pct: float | None
    test_error_pct: float | None
    epochs_ran: int
    wall_time_s: float
    message: str = ""


def cells_of(spec: GridSpec) -> list[Cell]:
    """Canonical cell enumeration for a grid."""
    return [
        Cell(a, l, n, c, m)
        for a, l, n, c, m in product(
            spec.activations,
            spec.layer_counts,
            spec.neuron_counts,
            spec.corruption_levels,
            spec.corruption_modes,
        )
    ]


def cell_seed(base_seed: int, cell: Cell) -> int:
    return derive_seed(base_seed, "cell", cell.key)


def run_cell(spec: GridSpec, cell: Cell, data: Dataset) -> TrialResult:
    """Pre-train, unroll, fine-tune and evaluate one cell."""
    seed = cell_seed(spec.base_seed, cell)
    pre_cfg = spec.pretrain_cfg or default_pretrain_config(0)
    fine_cfg = spec.finetune_cfg or default_finetune_config(0)
    pre_cfg = replace(pre_cfg, seed=derive_seed(seed, "pretrain"))
    fine_cfg = replace(fine_cfg, sgd=replace(fine_cfg.sgd, seed=derive_seed(seed, "finetune")))

    stack = StackSpec(
        input_dim=data.d,
        hidden_dims=(cell.n_neurons,) * cell.n_layers,
        hidden_activation=cell.activation,
        n_classes=data.n_classes,
        corruption=CorruptionSpec(cell.corruption_level, derive_seed(seed, "corrupt")),
        corruption_mode=cell.corruption_mode,
    )
    started = time.perf_counter()
    deadline = started + spec.time_budget_s if spec.time_budget_s is not None else None

    def result(status, val_pct, test_pct, epochs, message=""):
        return TrialResult(
            cell.activation, cell.n_layers, cell.n_neurons, cell.corruption_level,
            cell.corruption_mode, seed, status, val_pct, test_pct, epochs,
            time.perf_counter() - started, message,
        )

    try:
        train_x, train_y = data.subset(Split.TRAIN)
        valid_x, valid_y = data.subset(Split.VALID)
        das = pretrain(stack, train_x, pre_cfg, deadline=deadline)
        net = unroll(das, stack, Rng(derive_seed(seed, "unroll")))
        net, history = finetune(net, (train_x, train_y), (valid_x, valid_y),
                                fine_cfg, deadline=deadline)
        val_err, _ = evaluate(net, valid_x, valid_y)
        test_x, test_y = data.subset(Split.TEST)
        test_pct = None
        if test_x.shape[0]:
            test_err, _ = evaluate(net, test_x, test_y)
            test_pct = 100.0 * test_err
        return result("ok", 100.0 * val_err, test_pct, history.epochs_ran)
    except TimeBudgetExceeded as exc:
        return result("budget_exceeded", None, None, 0, str(exc))
    except (SdanetError, ValueError) as exc:
        return result("failed", None, None, 0, str(exc))


def _run_cell_job(args) -> TrialResult:
    return run_cell(*args)


def run_grid(spec: GridSpec, data: Dataset, workers: int = 1) -> list[TrialResult]:
    """Run every cell; the returned ledger is in canonical cell order
    and does not depend on the worker count."""
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    cells = cells_of(spec)
    if workers == 1 or len(cells) == 1:
        return [run_cell(spec, cell, data) for cell in cells]
    jobs = [(spec, cell, data) for cell in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_cell_job, jobs))


def select_best(ledger: list[TrialResult]) -> TrialResult:
    """Lowest validation error among successful cells; ties favour the
    cheaper model (fewer layers, then fewer neurons, then lower seed)."""
    ok = [t for t in ledger if t.status == "ok"]
    if not ok:
        raise ValueError("no successful grid cells to select from")
    return min(ok, key=lambda t: (t.validation_error_pct, t.n_layers, t.n_neurons, t.seed))


@dataclass
class ActivationDepthTable:
    """Validation-error matrix: one row per activation, one column per
    layer count, at a fixed hidden width. Missing cells are NaN and
    listed in `missing`."""

    activations: list[ActivationKind]
    layer_counts: list[int]
    errors: np.ndarray  # (len(activations), len(layer_counts)), NaN = missing
    missing: list[tuple[ActivationKind, int]]


def activation_depth_table(
    ledger: list[TrialResult], n_neurons: int | None = None
) -> ActivationDepthTable:
    """Project the ledger onto an activation x depth matrix.

    `n_neurons` picks the width; it may be omitted when the ledger holds
    a single width. When several trials land in one matrix entry (e.g.
    multiple corruption settings), the first in ledger order wins.
    """
    widths = sorted({t.n_neurons for t in ledger})
    if n_neurons is None:
        if len(widths) != 1:
            raise ValueError(f"ledger holds several widths {widths}; pass n_neurons")
        n_neurons = widths[0]
    subset = [t for t in ledger if t.n_neurons == n_neurons]
    activations = sorted({t.activation for t in subset}, key=lambda a: a.value)
    layer_counts = sorted({t.n_layers for t in subset})
    errors = np.full((len(activations), len(layer_counts)), np.nan)
    for t in subset:
        if t.status != "ok":
            continue
        i = activations.index(t.activation)
        j = layer_counts.index(t.n_layers)
        if np.isnan(errors[i, j]):
            errors[i, j] = t.validation_error_pct
    missing = [
        (a, l)
        for i, a in enumerate(activations)
        for j, l in enumerate(layer_counts)
        if np.isnan(errors[i, j])
    ]
    return ActivationDepthTable(activations, layer_counts, errors, missing)
