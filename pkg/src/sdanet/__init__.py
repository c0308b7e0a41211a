"""sdanet: stacked denoising autoencoders for digit classification,
built on plain numpy.

The package covers the full pipeline: IDX data loading, denoising
autoencoders with tied weights, greedy layer-wise pre-training,
supervised fine-tuning with early stopping, classical baselines, a
reproducible hyperparameter grid search, and a CLI front end.
"""

from .autoencoder import (
    CorruptionSpec,
    DenoisingAutoencoder,
    corrupt,
    da_backprop,
    da_encode,
    da_forward,
    init_denoising_autoencoder,
    train_da,
)
from .baselines import BaselineRow, fit, predict_baseline, run_baseline_suite
from .data import (
    Dataset,
    Split,
    load_idx_images,
    load_idx_labels,
    minibatches,
    normalize,
    split,
    write_idx_images,
    write_idx_labels,
)
from .datasets import bars, export_idx, synthetic_digits
from .errors import (
    ConfigError,
    ContractError,
    DataFormatError,
    NumericError,
    SdanetError,
    ShapeError,
    TimeBudgetExceeded,
)
from .linalg import Rng, derive_seed
from .modelfile import load_da_stack, load_model, load_net, save_da_stack, save_net
from .nn import (
    ActivationKind,
    DenseLayer,
    Loss,
    SgdConfig,
    activate,
    backprop,
    forward_pass,
    init_dense_layer,
    sgd_step,
)
from .sda import (
    CorruptionMode,
    FinetuneConfig,
    FinetuneHistory,
    StackSpec,
    SupervisedNet,
    build_random_net,
    classify,
    default_finetune_config,
    default_pretrain_config,
    encode_through,
    evaluate,
    finetune,
    predict,
    pretrain,
    unroll,
)
from .search import (
    ActivationDepthTable,
    Cell,
    GridSpec,
    TrialResult,
    activation_depth_table,
    cell_seed,
    cells_of,
    run_cell,
    run_grid,
    select_best,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationDepthTable",
    "ActivationKind",
    "BaselineRow",
    "Cell",
    "ConfigError",
    "ContractError",
    "CorruptionMode",
    "CorruptionSpec",
    "DataFormatError",
    "Dataset",
    "DenoisingAutoencoder",
    "DenseLayer",
    "FinetuneConfig",
    "FinetuneHistory",
    "GridSpec",
    "Loss",
    "NumericError",
    "Rng",
    "SdanetError",
    "SgdConfig",
    "ShapeError",
    "Split",
    "StackSpec",
    "SupervisedNet",
    "TimeBudgetExceeded",
    "TrialResult",
    "activate",
    "activation_depth_table",
    "backprop",
    "bars",
    "build_random_net",
    "cell_seed",
    "cells_of",
    "classify",
    "corrupt",
    "da_backprop",
    "da_encode",
    "da_forward",
    "default_finetune_config",
    "default_pretrain_config",
    "derive_seed",
    "encode_through",
    "evaluate",
    "export_idx",
    "finetune",
    "fit",
    "forward_pass",
    "init_dense_layer",
    "init_denoising_autoencoder",
    "load_da_stack",
    "load_idx_images",
    "load_idx_labels",
    "load_model",
    "load_net",
    "minibatches",
    "normalize",
    "predict",
    "predict_baseline",
    "pretrain",
    "run_baseline_suite",
    "run_cell",
    "run_grid",
    "save_da_stack",
    "save_net",
    "select_best",
    "sgd_step",
    "split",
    "synthetic_digits",
    "train_da",
    "unroll",
    "write_idx_images",
    "write_idx_labels",
]
