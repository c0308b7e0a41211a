"""Run configuration: a JSON file plus command-line flag overrides.

Every key is validated against the schema below before any training
starts; unknown keys are rejected by name so typos cannot silently fall
back to defaults. Flags win over file values. Sections left out fall
back to the documented training defaults, with all seeds derived from
the top-level seed so one number pins the whole run.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .autoencoder import CorruptionSpec
from .data import Dataset, Split, load_idx_images, load_idx_labels, normalize, split
from .errors import ConfigError
from .linalg import derive_seed
from .nn import ActivationKind, SgdConfig
from .sda import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_CORRUPTION_LEVEL,
    DEFAULT_FINETUNE_EPOCHS,
    DEFAULT_FINETUNE_LR,
    DEFAULT_MIN_DELTA,
    DEFAULT_PATIENCE,
    DEFAULT_PRETRAIN_EPOCHS,
    DEFAULT_PRETRAIN_LR,
    CorruptionMode,
    FinetuneConfig,
    StackSpec,
)
from .search import GridSpec

_SCHEMA = {
    "seed": int,
    "out_dir": str,
    "data": {
        "images": str,
        "labels": str,
        "train_images": str,
        "train_labels": str,
        "valid_images": str,
        "valid_labels": str,
        "test_images": str,
        "test_labels": str,
        "fractions": list,
        "split_seed": int,
        "n_classes": int,
    },
    "stack": {
        "hidden_dims": list,
        "hidden_activation": str,
        "corruption_level": (int, float),
        "corruption_mode": str,
    },
    "pretrain": {
        "learning_rate": (int, float),
        "batch_size": int,
        "epochs": int,
        "seed": int,
    },
    "finetune": {
        "learning_rate": (int, float),
        "batch_size": int,
        "epochs": int,
        "patience": int,
        "min_delta": (int, float),
        "seed": int,
    },
    "grid": {
        "activations": list,
        "layer_counts": list,
        "neuron_counts": list,
        "corruption_levels": list,
        "corruption_modes": list,
        "time_budget_s": (int, float),
    },
}


def _validate(section: dict, schema: dict, path: str) -> None:
    for key, value in section.items():
        if key not in schema:
            raise ConfigError(f"unknown configuration key '{path}{key}'")
        expected = schema[key]
        if isinstance(expected, dict):
            if not isinstance(value, dict):
                raise ConfigError(f"configuration key '{path}{key}' must be an object")
            _validate(value, expected, f"{path}{key}.")
        elif value is not None and not isinstance(value, expected):
            kind = expected.__name__ if isinstance(expected, type) else "number"
            raise ConfigError(f"configuration key '{path}{key}' must be a {kind}")


class RunConfig:
    """Validated effective configuration (file values + flag overrides)."""

    def __init__(self, raw: dict):
        if not isinstance(raw, dict):
            raise ConfigError("configuration root must be a JSON object")
        _validate(raw, _SCHEMA, "")
        self.raw = raw
        self.seed = raw.get("seed", 0)
        self.out_dir = Path(raw.get("out_dir", "out"))

    def digest(self) -> str:
        """Hex digest of the effective configuration, for provenance.

        out_dir is excluded: where results are written has no bearing on
        what they are, and reports should be byte-identical across runs
        that differ only in destination.
        """
        semantic = {k: v for k, v in self.raw.items() if k != "out_dir"}
        canon = json.dumps(semantic, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def _section(self, name) -> dict:
        return self.raw.get(name) or {}

    def _seed_for(self, section: str) -> int:
        sec = self._section(section)
        if sec.get("seed") is not None:
            return sec["seed"]
        return derive_seed(self.seed, section)

    # -- dataset -----------------------------------------------------------

    def load_dataset(self) -> Dataset:
        """Load IDX data: either one images/labels pair split by
        fractions, or explicit per-split file pairs."""
        d = self._section("data")
        if d.get("train_images") or d.get("train_labels"):
            return self._load_per_split(d)
        if not d.get("images"):
            raise ConfigError("missing dataset path: set 'data.images' or 'data.train_images'")
        if not d.get("labels"):
            raise ConfigError("missing dataset path: set 'data.labels'")
        _, _, _, pixels = load_idx_images(d["images"])
        labels = load_idx_labels(d["labels"])
        samples = normalize(pixels)
        if samples.shape[0] != labels.shape[0]:
            raise ConfigError(
                f"data.images holds {samples.shape[0]} samples but data.labels "
                f"holds {labels.shape[0]}"
            )
        n_classes = d.get("n_classes") or (int(labels.max()) + 1 if labels.size else 2)
        ds = Dataset(samples, labels, n_classes)
        fractions = tuple(d.get("fractions", (5 / 7, 1 / 7, 1 / 7)))
        try:
            return split(ds, fractions, d.get("split_seed", derive_seed(self.seed, "split")))
        except ValueError as exc:
            raise ConfigError(f"data.fractions: {exc}") from None

    def _load_per_split(self, d: dict) -> Dataset:
        parts = []
        for tag in Split:
            name = tag.name.lower()
            img_key, lbl_key = f"{name}_images", f"{name}_labels"
            if not d.get(img_key) and not d.get(lbl_key):
                continue
            if not d.get(img_key) or not d.get(lbl_key):
                raise ConfigError(f"missing dataset path: 'data.{img_key}' and "
                                  f"'data.{lbl_key}' must be given together")
            _, _, _, pixels = load_idx_images(d[img_key])
            labels = load_idx_labels(d[lbl_key])
            samples = normalize(pixels)
            if samples.shape[0] != labels.shape[0]:
                raise ConfigError(
                    f"data.{img_key} and data.{lbl_key} disagree on the sample count"
                )
            parts.append((tag, samples, labels))
        if not any(tag is Split.TRAIN for tag, _, _ in parts):
            raise ConfigError("missing dataset path: 'data.train_images'")
        samples = np.concatenate([p[1] for p in parts])
        labels = np.concatenate([p[2] for p in parts])
        tags = np.concatenate(
            [np.full(p[1].shape[0], p[0], dtype=np.uint8) for p in parts]
        )
        n_classes = d.get("n_classes") or (int(labels.max()) + 1 if labels.size else 2)
        return Dataset(samples, labels, n_classes, tags)

    # -- model/training sections --------------------------------------------

    def stack_spec(self, input_dim: int, n_classes: int) -> StackSpec:
        s = self._section("stack")
        if "hidden_dims" not in s:
            raise ConfigError("missing configuration key 'stack.hidden_dims'")
        level = s.get("corruption_level", DEFAULT_CORRUPTION_LEVEL)
        try:
            return StackSpec(
                input_dim=input_dim,
                hidden_dims=tuple(s["hidden_dims"]),
                hidden_activation=ActivationKind.parse(s.get("hidden_activation", "sigmoid")),
                n_classes=n_classes,
                corruption=CorruptionSpec(level, derive_seed(self.seed, "corrupt")),
                corruption_mode=CorruptionMode.parse(s.get("corruption_mode", "every_layer")),
            )
        except ValueError as exc:
            raise ConfigError(f"stack: {exc}") from None

    def pretrain_config(self) -> SgdConfig:
        p = self._section("pretrain")
        try:
            return SgdConfig(
                learning_rate=p.get("learning_rate", DEFAULT_PRETRAIN_LR),
                batch_size=p.get("batch_size", DEFAULT_BATCH_SIZE),
                epochs=p.get("epochs", DEFAULT_PRETRAIN_EPOCHS),
                seed=self._seed_for("pretrain"),
            )
        except ValueError as exc:
            raise ConfigError(f"pretrain: {exc}") from None

    def finetune_config(self) -> FinetuneConfig:
        f = self._section("finetune")
        try:
            return FinetuneConfig(
                sgd=SgdConfig(
                    learning_rate=f.get("learning_rate", DEFAULT_FINETUNE_LR),
                    batch_size=f.get("batch_size", DEFAULT_BATCH_SIZE),
                    epochs=f.get("epochs", DEFAULT_FINETUNE_EPOCHS),
                    seed=self._seed_for("finetune"),
                ),
                patience=f.get("patience", DEFAULT_PATIENCE),
                min_delta=f.get("min_delta", DEFAULT_MIN_DELTA),
            )
        except ValueError as exc:
            raise ConfigError(f"finetune: {exc}") from None

    def grid_spec(self) -> GridSpec:
        g = self._section("grid")
        for key in ("activations", "layer_counts", "neuron_counts"):
            if key not in g:
                raise ConfigError(f"missing configuration key 'grid.{key}'")
        try:
            return GridSpec(
                activations=tuple(ActivationKind.parse(a) for a in g["activations"]),
                layer_counts=tuple(int(n) for n in g["layer_counts"]),
                neuron_counts=tuple(int(n) for n in g["neuron_counts"]),
                corruption_levels=tuple(
                    float(c) for c in g.get("corruption_levels", [DEFAULT_CORRUPTION_LEVEL])
                ),
                corruption_modes=tuple(
                    CorruptionMode.parse(m) for m in g.get("corruption_modes", ["every_layer"])
                ),
                base_seed=self.seed,
                pretrain_cfg=self.pretrain_config(),
                finetune_cfg=self.finetune_config(),
                time_budget_s=g.get("time_budget_s"),
            )
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from None


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    """Read a JSON configuration file and apply flag overrides.

    `overrides` maps dotted keys ("data.images", "seed") to values;
    None values are ignored so unset flags never mask file values.
    """
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"configuration file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"configuration file is not valid JSON: {exc}") from None
    else:
        raw = {}
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        keys = dotted.split(".")
        node = raw
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"configuration key '{dotted}' conflicts with a scalar")
        node[keys[-1]] = value
    return RunConfig(raw)
