"""Deterministic result writers.

Every file produced here is byte-for-byte reproducible for a given run:
floats are written with repr (shortest round-trip form), rows follow a
canonical order, newlines are explicit "\n", and anything inherently
nondeterministic (wall-clock timings) goes to a separate timing file so
the result files themselves can be compared with plain `cmp`.
"""

from __future__ import annotations

import csv
import json
import math
from enum import Enum
from pathlib import Path

import numpy as np

from .baselines import BaselineRow
from .sda import FinetuneHistory
from .search import ActivationDepthTable, TrialResult

LEDGER_FIELDS = (
    "activation",
    "n_layers",
    "n_neurons",
    "corruption_level",
    "corruption_mode",
    "seed",
    "status",
    "validation_error_pct",
    "test_error_pct",
    "epochs_ran",
    "message",
)


def _plain(value):
    """Reduce enums to their string values so CSV/JSON stay stable."""
    if isinstance(value, Enum):
        return value.value
    return value


def _fmt(value) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, fields, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _trial_row(trial: TrialResult) -> list:
    return [getattr(trial, name) for name in LEDGER_FIELDS]


def write_ledger(out_dir: Path, ledger: list[TrialResult]) -> None:
    """Write ledger.csv / ledger.json (deterministic) plus timing.json.

    Wall times never enter the ledger files; they are nondeterministic
    and live in timing.json keyed by the same cell order.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(out_dir / "ledger.csv", LEDGER_FIELDS, [_trial_row(t) for t in ledger])
    records = [
        {name: _plain(getattr(t, name)) for name in LEDGER_FIELDS} for t in ledger
    ]
    (out_dir / "ledger.json").write_text(
        json.dumps(records, sort_keys=True, indent=2) + "\n"
    )
    timing = [
        {"cell": f"{t.activation.value}/{t.n_layers}x{t.n_neurons}/"
                 f"{t.corruption_level}/{t.corruption_mode.value}",
         "wall_time_s": t.wall_time_s}
        for t in ledger
    ]
    (out_dir / "timing.json").write_text(
        json.dumps(timing, sort_keys=True, indent=2) + "\n"
    )


def write_activation_depth_table(path: Path, table: ActivationDepthTable) -> None:
    """Write the activation-by-depth error matrix as CSV (blank = missing)."""
    rows = []
    for i, act in enumerate(table.activations):
        row = [act.value]
        for j in range(len(table.layer_counts)):
            err = table.errors[i, j]
            row.append(None if math.isnan(err) else float(err))
        rows.append(row)
    fields = ["activation"] + [f"layers_{n}" for n in table.layer_counts]
    _write_csv(Path(path), fields, rows)


def write_history(path: Path, history: FinetuneHistory) -> None:
    """Per-epoch fine-tuning trace: mean train loss and validation error."""
    rows = [
        [epoch + 1, history.train_loss[epoch], history.valid_error[epoch]]
        for epoch in range(history.epochs_ran)
    ]
    _write_csv(Path(path), ["epoch", "train_loss", "valid_error"], rows)


def write_pretrain_trace(path: Path, traces: list[list[float]]) -> None:
    """Per-layer, per-epoch mean reconstruction loss during pre-training."""
    rows = []
    for layer, trace in enumerate(traces):
        for epoch, loss in enumerate(trace):
            rows.append([layer + 1, epoch + 1, loss])
    _write_csv(Path(path), ["layer", "epoch", "loss"], rows)


def write_confusion(path: Path, confusion: np.ndarray) -> None:
    """Confusion matrix CSV; rows are true classes, columns predictions."""
    n = confusion.shape[0]
    fields = ["true_class"] + [f"pred_{c}" for c in range(n)]
    rows = [[c] + [int(v) for v in confusion[c]] for c in range(n)]
    _write_csv(Path(path), fields, rows)


def write_baseline_table(out_dir: Path, rows: list[BaselineRow]) -> None:
    """Baseline comparison as CSV plus an aligned plain-text table."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out_dir / "baselines.csv",
        ["model", "params", "validation_error_pct", "note"],
        [
            [r.model, json.dumps(r.params, sort_keys=True), r.validation_error_pct, r.note]
            for r in rows
        ],
    )
    lines = [f"{'model':<22} {'params':<24} {'val error %':>12}  note"]
    for r in rows:
        err = "" if r.validation_error_pct is None else f"{r.validation_error_pct:.2f}"
        params = json.dumps(r.params, sort_keys=True) if r.params else ""
        lines.append(f"{r.model:<22} {params:<24} {err:>12}  {r.note}")
    (out_dir / "baselines.txt").write_text("\n".join(lines) + "\n")


def write_summary(path: Path, payload: dict) -> None:
    """Sorted-key JSON summary (error rates, config digest, seeds, paths)."""
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
