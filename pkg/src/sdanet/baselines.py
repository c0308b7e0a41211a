"""Classical comparison models under one fit/predict interface.

All models are implemented here directly on numpy; the logistic
regression reuses the network machinery and is exactly a zero-hidden-
layer softmax net. Support-vector machines and decision trees are out
of scope and appear in the suite as placeholder rows so the comparison
table keeps its familiar shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, Split
from .errors import ShapeError
from .linalg import Rng, derive_seed
from .nn import ActivationKind, init_dense_layer
from .sda import (
    FinetuneConfig,
    StackSpec,
    SupervisedNet,
    build_random_net,
    default_finetune_config,
    finetune,
)
from .sda import predict as _net_probs
from .autoencoder import CorruptionSpec

VARIANCE_FLOOR = 1e-9
LAPLACE_ALPHA = 1.0
BINARIZE_THRESHOLD = 0.5


def _check_classes(labels: np.ndarray, n_classes: int) -> None:
    present = np.unique(labels)
    missing = sorted(set(range(n_classes)) - set(present.tolist()))
    if missing:
        raise ValueError(f"training set is missing classes {missing}")


def _check_dim(x: np.ndarray, d: int) -> None:
    if x.shape[-1] != d:
        raise ShapeError(f"input has dimension {x.shape[-1]}, model expects {d}")


class LogisticRegression:
    """Softmax regression trained by SGD; a zero-hidden-layer net."""

    def __init__(self, net: SupervisedNet):
        self.net = net

    @classmethod
    def fit(cls, x, y, n_classes, valid, cfg: FinetuneConfig, seed: int = 0):
        _check_classes(y, n_classes)
        layer = init_dense_layer(
            x.shape[1], n_classes, ActivationKind.SOFTMAX, Rng(derive_seed(seed, "logreg"))
        )
        net = SupervisedNet([layer])
        finetune(net, (x, y), valid, cfg)
        return cls(net)

    def predict(self, x: np.ndarray) -> int:
        _check_dim(x, self.net.input_dim)
        return int(np.argmax(_net_probs(self.net, x)))

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        _check_dim(x, self.net.input_dim)
        return np.argmax(_net_probs(self.net, x), axis=-1)


class KNearest:
    """k-nearest neighbours on Euclidean distance, majority vote.

    Vote ties go to the lowest class index; distance ties keep the
    sample stored earlier.
    """

    def __init__(self, k: int, x: np.ndarray, y: np.ndarray, n_classes: int):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        self.k = k
        self.x = x
        self.y = y
        self.n_classes = n_classes

    @classmethod
    def fit(cls, x, y, n_classes, k: int = 3):
        _check_classes(y, n_classes)
        return cls(k, np.array(x), np.array(y), n_classes)

    def predict(self, x: np.ndarray) -> int:
        _check_dim(x, self.x.shape[1])
        return int(self.predict_batch(x[None, :])[0])

    def predict_batch(self, x: np.ndarray, chunk: int = 512) -> np.ndarray:
        _check_dim(x, self.x.shape[1])
        train_sq = np.sum(self.x * self.x, axis=1)
        preds = np.empty(x.shape[0], dtype=np.int64)
        for start in range(0, x.shape[0], chunk):
            q = x[start : start + chunk]
            d2 = np.sum(q * q, axis=1)[:, None] + train_sq[None, :] - 2.0 * (q @ self.x.T)
            near = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
            for i in range(near.shape[0]):
                votes = np.bincount(self.y[near[i]], minlength=self.n_classes)
                preds[start + i] = int(np.argmax(votes))
        return preds


class NearestCentroid:
    """Assigns the class whose training mean is closest (Euclidean)."""

    def __init__(self, centroids: np.ndarray):
        self.centroids = centroids

    @classmethod
    def fit(cls, x, y, n_classes):
        _check_classes(y, n_classes)
        centroids = np.stack([x[y == c].mean(axis=0) for c in range(n_classes)])
        return cls(centroids)

    def predict(self, x: np.ndarray) -> int:
        _check_dim(x, self.centroids.shape[1])
        return int(np.argmin(np.sum((self.centroids - x) ** 2, axis=1)))

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        _check_dim(x, self.centroids.shape[1])
        d2 = (
            np.sum(x * x, axis=1)[:, None]
            + np.sum(self.centroids * self.centroids, axis=1)[None, :]
            - 2.0 * (x @ self.centroids.T)
        )
        return np.argmin(d2, axis=1)


class GaussianNB:
    """Per-class independent Gaussians with a variance floor."""

    def __init__(self, means, variances, log_priors):
        self.means = means
        self.variances = variances
        self.log_priors = log_priors

    @classmethod
    def fit(cls, x, y, n_classes):
        _check_classes(y, n_classes)
        means, variances, priors = [], [], []
        for c in range(n_classes):
            xc = x[y == c]
            means.append(xc.mean(axis=0))
            variances.append(np.maximum(xc.var(axis=0), VARIANCE_FLOOR))
            priors.append(xc.shape[0] / x.shape[0])
        return cls(np.stack(means), np.stack(variances), np.log(np.array(priors)))

    def _log_posterior(self, x: np.ndarray) -> np.ndarray:
        _check_dim(x, self.means.shape[1])
        xb = np.atleast_2d(x)
        ll = -0.5 * np.sum(
            np.log(2.0 * np.pi * self.variances)[None, :, :]
            + (xb[:, None, :] - self.means[None, :, :]) ** 2 / self.variances[None, :, :],
            axis=2,
        )
        return ll + self.log_priors[None, :]

    def predict(self, x: np.ndarray) -> int:
        return int(np.argmax(self._log_posterior(x)[0]))

    def predict_batch(self, x: np.ndarray, chunk: int = 1024) -> np.ndarray:
        out = np.empty(x.shape[0], dtype=np.int64)
        for start in range(0, x.shape[0], chunk):
            out[start : start + chunk] = np.argmax(
                self._log_posterior(x[start : start + chunk]), axis=1
            )
        return out


class MultinomialNB:
    """Event-count naive Bayes with Laplace smoothing (alpha = 1)."""

    def __init__(self, feature_log_prob, log_priors):
        self.feature_log_prob = feature_log_prob
        self.log_priors = log_priors

    @classmethod
    def fit(cls, x, y, n_classes):
        _check_classes(y, n_classes)
        d = x.shape[1]
        log_probs, priors = [], []
        for c in range(n_classes):
            counts = x[y == c].sum(axis=0)
            log_probs.append(np.log(counts + LAPLACE_ALPHA) - np.log(counts.sum() + LAPLACE_ALPHA * d))
            priors.append((y == c).sum() / y.shape[0])
        return cls(np.stack(log_probs), np.log(np.array(priors)))

    def _log_posterior(self, x: np.ndarray) -> np.ndarray:
        _check_dim(x, self.feature_log_prob.shape[1])
        return np.atleast_2d(x) @ self.feature_log_prob.T + self.log_priors[None, :]

    def predict(self, x: np.ndarray) -> int:
        return int(np.argmax(self._log_posterior(x)[0]))

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        return np.argmax(self._log_posterior(x), axis=1)


class BernoulliNB:
    """Per-class Bernoulli features after binarizing at 0.5."""

    def __init__(self, feature_prob, log_priors, threshold=BINARIZE_THRESHOLD):
        self.feature_prob = feature_prob
        self.log_priors = log_priors
        self.threshold = threshold

    @classmethod
    def fit(cls, x, y, n_classes, threshold: float = BINARIZE_THRESHOLD):
        _check_classes(y, n_classes)
        xb = (x > threshold).astype(np.float64)
        probs, priors = [], []
        for c in range(n_classes):
            xc = xb[y == c]
            probs.append((xc.sum(axis=0) + LAPLACE_ALPHA) / (xc.shape[0] + 2.0 * LAPLACE_ALPHA))
            priors.append(xc.shape[0] / x.shape[0])
        return cls(np.stack(probs), np.log(np.array(priors)), threshold)

    def _log_posterior(self, x: np.ndarray) -> np.ndarray:
        _check_dim(x, self.feature_prob.shape[1])
        xb = (np.atleast_2d(x) > self.threshold).astype(np.float64)
        log_p = np.log(self.feature_prob)
        log_q = np.log1p(-self.feature_prob)
        return xb @ log_p.T + (1.0 - xb) @ log_q.T + self.log_priors[None, :]

    def predict(self, x: np.ndarray) -> int:
        return int(np.argmax(self._log_posterior(x)[0]))

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        return np.argmax(self._log_posterior(x), axis=1)


class SingleHiddenAnn:
    """One hidden relu layer under softmax, trained with no pre-training."""

    def __init__(self, net: SupervisedNet):
        self.net = net

    @classmethod
    def fit(cls, x, y, n_classes, valid, cfg: FinetuneConfig, hidden: int = 700, seed: int = 0):
        _check_classes(y, n_classes)
        spec = StackSpec(
            input_dim=x.shape[1],
            hidden_dims=(hidden,),
            hidden_activation=ActivationKind.RELU,
            n_classes=n_classes,
            corruption=CorruptionSpec(0.0),
        )
        net = build_random_net(spec, Rng(derive_seed(seed, "ann")))
        finetune(net, (x, y), valid, cfg)
        return cls(net)

    def predict(self, x: np.ndarray) -> int:
        return int(np.argmax(_net_probs(self.net, x)))

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        return np.argmax(_net_probs(self.net, x), axis=-1)


# Model registry: name -> (factory, needs neural-net training budget).
_FITTERS = {
    "logistic_regression": (LogisticRegression.fit, True),
    "knn": (KNearest.fit, False),
    "nearest_centroid": (NearestCentroid.fit, False),
    "gaussian_nb": (GaussianNB.fit, False),
    "multinomial_nb": (MultinomialNB.fit, False),
    "bernoulli_nb": (BernoulliNB.fit, False),
    "ann": (SingleHiddenAnn.fit, True),
}

# Placeholder rows kept for comparison-table parity; no solver in scope.
NOT_IMPLEMENTED = (
    "decision_tree",
    "svm",
    "svm_linear",
    "svm_rbf",
    "svm_sigmoid",
)

DEFAULT_SUITE = (
    "logistic_regression",
    "decision_tree",
    ("knn", {"k": 3}),
    "nearest_centroid",
    "gaussian_nb",
    "multinomial_nb",
    "bernoulli_nb",
    "svm",
    "svm_linear",
    "svm_rbf",
    "svm_sigmoid",
    ("ann", {"hidden": 700}),
)


def fit(name: str, x: np.ndarray, y: np.ndarray, n_classes: int, **kwargs):
    """Train the named baseline on a labeled set."""
    if name not in _FITTERS:
        raise ValueError(f"unknown baseline '{name}' (valid: {sorted(_FITTERS)})")
    if x.shape[0] == 0:
        raise ValueError("cannot fit on an empty training set")
    factory, needs_nn = _FITTERS[name]
    if not needs_nn:
        kwargs.pop("valid", None)
        kwargs.pop("cfg", None)
        kwargs.pop("seed", None)
    return factory(x, y, n_classes, **kwargs)


def predict_baseline(model, x: np.ndarray) -> int:
    """Class index for one sample under the model's decision rule."""
    return model.predict(x)


@dataclass
class BaselineRow:
    model: str
    params: dict = field(default_factory=dict)
    validation_error_pct: float | None = None
    note: str = ""


def run_baseline_suite(
    data: Dataset,
    specs=DEFAULT_SUITE,
    cfg: FinetuneConfig | None = None,
    seed: int = 0,
) -> list[BaselineRow]:
    """Fit each requested model on the train split and score it on the
    validation split. Placeholder models produce rows with no error and
    a 'not implemented' note. Deterministic given the seed."""
    train_x, train_y = data.subset(Split.TRAIN)
    valid_x, valid_y = data.subset(Split.VALID)
    if train_x.shape[0] == 0 or valid_x.shape[0] == 0:
        raise ValueError("baseline suite needs nonempty train and valid splits")
    if cfg is None:
        cfg = default_finetune_config(derive_seed(seed, "baseline-nn"))
    rows = []
    for spec in specs:
        name, params = spec if isinstance(spec, tuple) else (spec, {})
        if name in NOT_IMPLEMENTED:
            rows.append(BaselineRow(name, dict(params), None, "not implemented"))
            continue
        if name not in _FITTERS:
            raise ValueError(f"unknown baseline '{name}' (valid: {sorted(_FITTERS)})")
        kwargs = dict(params)
        if _FITTERS[name][1]:
            kwargs.update(valid=(valid_x, valid_y), cfg=cfg, seed=derive_seed(seed, name))
        model = fit(name, train_x, train_y, data.n_classes, **kwargs)
        preds = model.predict_batch(valid_x)
        error_pct = 100.0 * float(np.mean(preds != valid_y))
        rows.append(BaselineRow(name, dict(params), error_pct))
    return rows
