"""Command-line front end.

Five subcommands: pretrain, finetune, gridsearch, eval, baselines.
Each reads a JSON configuration file (``--config``) with flag overrides
winning over file values, trains or evaluates, and writes deterministic
reports under ``--out``. No environment variables are consulted.

Exit codes: 0 success, 2 configuration error, 3 data-format error,
4 numeric failure (non-finite loss), 5 internal error.
"""

from __future__ import annotations

import argparse
import sys

from .autoencoder import CorruptionSpec
from .baselines import run_baseline_suite
from .config import RunConfig, load_config
from .data import Split, load_idx_images, load_idx_labels, normalize
from .errors import ConfigError, DataFormatError, NumericError, SdanetError
from .linalg import Rng, derive_seed
from .modelfile import load_da_stack, load_model, save_da_stack, save_net
from .reports import (
    write_activation_depth_table,
    write_baseline_table,
    write_confusion,
    write_history,
    write_ledger,
    write_pretrain_trace,
    write_summary,
)
from .sda import (
    StackSpec,
    build_random_net,
    evaluate,
    finetune,
    pretrain,
    unroll,
)
from .search import activation_depth_table, run_grid, select_best

_DATA_FLAGS = (
    ("--images", "data.images"),
    ("--labels", "data.labels"),
    ("--train-images", "data.train_images"),
    ("--train-labels", "data.train_labels"),
    ("--valid-images", "data.valid_images"),
    ("--valid-labels", "data.valid_labels"),
    ("--test-images", "data.test_images"),
    ("--test-labels", "data.test_labels"),
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdanet",
        description="Stacked denoising autoencoder training and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, workers: bool = False) -> None:
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--seed", type=int, help="override the top-level seed")
        p.add_argument("--out", help="output directory for reports and models")
        if workers:
            p.add_argument("--workers", type=int, default=1,
                           help="parallel worker processes (results identical)")
        for flag, _ in _DATA_FLAGS:
            p.add_argument(flag, metavar="PATH", help=f"IDX file ({flag[2:]})")

    common(sub.add_parser("pretrain", help="greedy layer-wise pre-training"))
    fine = sub.add_parser("finetune", help="supervised fine-tuning")
    common(fine)
    fine.add_argument("--model", required=True, metavar="PATH|none",
                      help="pretrained stack file, or 'none' for random init")
    common(sub.add_parser("gridsearch", help="hyperparameter grid"), workers=True)
    ev = sub.add_parser("eval", help="error rate of a saved model")
    common(ev)
    ev.add_argument("--model", required=True, metavar="PATH", help="saved net file")
    ev.add_argument("--split", default="test", help="which split to score (default test)")
    common(sub.add_parser("baselines", help="classical-baseline comparison table"))
    return parser


def _config_from(args) -> RunConfig:
    overrides = {"seed": args.seed, "out_dir": args.out}
    for flag, dotted in _DATA_FLAGS:
        overrides[dotted] = getattr(args, flag[2:].replace("-", "_"))
    return load_config(args.config, overrides)


def _require_splits(ds, names) -> None:
    for name in names:
        if ds.indices(Split.parse(name)).size == 0:
            raise ConfigError(f"this command needs a nonempty '{name}' split")


def cmd_pretrain(args) -> int:
    cfg = _config_from(args)
    ds = cfg.load_dataset()
    _require_splits(ds, ("train",))
    spec = cfg.stack_spec(ds.d, ds.n_classes)
    train_x, _ = ds.subset(Split.TRAIN)
    traces: list = []
    das = pretrain(spec, train_x, cfg.pretrain_config(), loss_out=traces)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    model_path = cfg.out_dir / "stack.model"
    save_da_stack(model_path, das, {"config_digest": cfg.digest(), "seed": cfg.seed})
    write_pretrain_trace(cfg.out_dir / "pretrain_loss.csv", traces)
    write_summary(cfg.out_dir / "summary.json", {
        "command": "pretrain",
        "config_digest": cfg.digest(),
        "seed": cfg.seed,
        "input_dim": ds.d,
        "hidden_dims": list(spec.hidden_dims),
        "hidden_activation": spec.hidden_activation.value,
        "corruption_level": spec.corruption.level,
        "corruption_mode": spec.corruption_mode.value,
        "n_train": int(ds.indices(Split.TRAIN).size),
        "final_losses": [trace[-1] for trace in traces],
    })
    print(f"pretrain: saved {len(das)}-layer stack to {model_path}")
    return 0


def _stack_spec_for_model(cfg: RunConfig, das, ds) -> StackSpec:
    """Cross-check a loaded stack against the config, or derive the spec
    from the stack when the config has no architecture section."""
    if "stack" in cfg.raw:
        spec = cfg.stack_spec(ds.d, ds.n_classes)
        if len(das) != len(spec.hidden_dims):
            raise ConfigError(
                f"pretrained stack has {len(das)} layers, configuration asks "
                f"for {len(spec.hidden_dims)}"
            )
        for k, (da, width) in enumerate(zip(das, spec.hidden_dims)):
            if da.n_hidden != width:
                raise ConfigError(
                    f"layer {k + 1}: pretrained width {da.n_hidden} does not "
                    f"match configured width {width}"
                )
            if da.encoder.activation is not spec.hidden_activation:
                raise ConfigError(
                    f"layer {k + 1}: pretrained activation "
                    f"'{da.encoder.activation.value}' does not match configured "
                    f"'{spec.hidden_activation.value}'"
                )
        if das[0].n_visible != spec.input_dim:
            raise ConfigError(
                f"layer 1: pretrained stack expects {das[0].n_visible} inputs, "
                f"data has {spec.input_dim}"
            )
        return spec
    if das[0].n_visible != ds.d:
        raise ConfigError(
            f"layer 1: pretrained stack expects {das[0].n_visible} inputs, "
            f"data has {ds.d}"
        )
    return StackSpec(
        input_dim=das[0].n_visible,
        hidden_dims=tuple(da.n_hidden for da in das),
        hidden_activation=das[0].encoder.activation,
        n_classes=ds.n_classes,
        corruption=CorruptionSpec(das[0].corruption.level, das[0].corruption.seed),
    )


def cmd_finetune(args) -> int:
    cfg = _config_from(args)
    ds = cfg.load_dataset()
    _require_splits(ds, ("train", "valid"))
    fine_cfg = cfg.finetune_config()
    if args.model == "none":
        spec = cfg.stack_spec(ds.d, ds.n_classes)
        net = build_random_net(spec, Rng(derive_seed(cfg.seed, "random-init")))
    else:
        das, _ = load_da_stack(args.model)
        spec = _stack_spec_for_model(cfg, das, ds)
        net = unroll(das, spec, Rng(derive_seed(cfg.seed, "unroll")))
    net, history = finetune(
        net, ds.subset(Split.TRAIN), ds.subset(Split.VALID), fine_cfg
    )
    valid_error, confusion = evaluate(net, *ds.subset(Split.VALID))
    summary = {
        "command": "finetune",
        "config_digest": cfg.digest(),
        "seed": cfg.seed,
        "init": "random" if args.model == "none" else "pretrained",
        "hidden_dims": list(spec.hidden_dims),
        "hidden_activation": spec.hidden_activation.value,
        "epochs_ran": history.epochs_ran,
        "best_epoch": history.best_epoch + 1,
        "validation_error_pct": 100.0 * valid_error,
    }
    if ds.indices(Split.TEST).size:
        test_error, _ = evaluate(net, *ds.subset(Split.TEST))
        summary["test_error_pct"] = 100.0 * test_error
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    model_path = cfg.out_dir / "net.model"
    save_net(model_path, net, {"config_digest": cfg.digest(), "seed": cfg.seed})
    write_history(cfg.out_dir / "history.csv", history)
    write_confusion(cfg.out_dir / "confusion.csv", confusion)
    write_summary(cfg.out_dir / "summary.json", summary)
    print(
        f"finetune: saved net to {model_path} "
        f"(validation error {100.0 * valid_error:.2f}%)"
    )
    return 0


def cmd_gridsearch(args) -> int:
    cfg = _config_from(args)
    if args.workers < 1:
        raise ConfigError(f"--workers must be >= 1, got {args.workers}")
    ds = cfg.load_dataset()
    _require_splits(ds, ("train", "valid", "test"))
    spec = cfg.grid_spec()
    ledger = run_grid(spec, ds, workers=args.workers)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    write_ledger(cfg.out_dir, ledger)
    if len(spec.neuron_counts) == 1:
        table = activation_depth_table(ledger)
        write_activation_depth_table(cfg.out_dir / "activation_depth.csv", table)
    summary = {
        "command": "gridsearch",
        "config_digest": cfg.digest(),
        "seed": cfg.seed,
        "cells": len(ledger),
        "ok": sum(t.status == "ok" for t in ledger),
        "failed": sum(t.status == "failed" for t in ledger),
        "budget_exceeded": sum(t.status == "budget_exceeded" for t in ledger),
    }
    try:
        best = select_best(ledger)
        summary["best"] = {
            "activation": best.activation.value,
            "n_layers": best.n_layers,
            "n_neurons": best.n_neurons,
            "corruption_level": best.corruption_level,
            "corruption_mode": best.corruption_mode.value,
            "seed": best.seed,
            "validation_error_pct": best.validation_error_pct,
        }
        print(
            f"gridsearch: best cell {best.activation.value}/"
            f"{best.n_layers}x{best.n_neurons} at "
            f"{best.validation_error_pct:.2f}% validation error"
        )
    except ValueError:
        print("gridsearch: no cell finished successfully")
    write_summary(cfg.out_dir / "best.json", summary)
    print(f"gridsearch: ledger written to {cfg.out_dir / 'ledger.csv'}")
    return 0


def _eval_data(args, cfg: RunConfig):
    """Eval scores one images/labels pair directly, or a named split of
    a per-split dataset."""
    d = cfg.raw.get("data") or {}
    if d.get("images") or d.get("labels"):
        if not (d.get("images") and d.get("labels")):
            raise ConfigError("eval needs both --images and --labels")
        _, _, _, pixels = load_idx_images(d["images"])
        labels = load_idx_labels(d["labels"])
        samples = normalize(pixels)
        if samples.shape[0] != labels.shape[0]:
            raise ConfigError("eval: images and labels disagree on the sample count")
        return samples, labels, "all"
    ds = cfg.load_dataset()
    tag = Split.parse(args.split)
    if ds.indices(tag).size == 0:
        raise ConfigError(f"eval: split '{args.split}' is empty")
    x, y = ds.subset(tag)
    return x, y, args.split


def cmd_eval(args) -> int:
    cfg = _config_from(args)
    samples, labels, split_name = _eval_data(args, cfg)
    kind, model, _ = load_model(args.model)
    if kind != "supervised_net":
        raise ConfigError(
            "eval needs a fine-tuned net model file; this file holds a "
            "pretrained stack (run finetune first)"
        )
    if int(labels.max(initial=0)) >= model.n_classes:
        raise ConfigError(
            f"labels go up to {int(labels.max())} but the model has "
            f"{model.n_classes} classes"
        )
    error, confusion = evaluate(model, samples, labels)
    if args.out:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        write_confusion(cfg.out_dir / "confusion.csv", confusion)
        write_summary(cfg.out_dir / "eval.json", {
            "command": "eval",
            "split": split_name,
            "n_samples": int(samples.shape[0]),
            "error_pct": 100.0 * error,
        })
    print(f"eval: error {100.0 * error:.2f}% on {samples.shape[0]} samples ({split_name})")
    return 0


def cmd_baselines(args) -> int:
    cfg = _config_from(args)
    ds = cfg.load_dataset()
    _require_splits(ds, ("train", "valid"))
    rows = run_baseline_suite(ds, cfg=cfg.finetune_config(), seed=cfg.seed)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    write_baseline_table(cfg.out_dir, rows)
    write_summary(cfg.out_dir / "summary.json", {
        "command": "baselines",
        "config_digest": cfg.digest(),
        "seed": cfg.seed,
        "rows": len(rows),
    })
    for row in rows:
        err = ("-" if row.validation_error_pct is None
               else f"{row.validation_error_pct:.2f}%")
        print(f"baselines: {row.model:<16} {err:>8}  {row.note}")
    return 0


_COMMANDS = {
    "pretrain": cmd_pretrain,
    "finetune": cmd_finetune,
    "gridsearch": cmd_gridsearch,
    "eval": cmd_eval,
    "baselines": cmd_baselines,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags, 0 on --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataFormatError as exc:
        print(f"data format error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4
    except FileNotFoundError as exc:
        # a user-supplied path that does not exist is a config mistake
        print(f"config error: no such file: {exc.filename or exc}", file=sys.stderr)
        return 2
    except (SdanetError, ValueError, OSError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
