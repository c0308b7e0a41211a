"""Classical baselines on one dataset, one table.

Runs the default comparison suite (logistic regression, k-NN, nearest
centroid, three naive-Bayes variants, a one-hidden-layer net, and
placeholder rows for models intentionally out of scope) on a small
synthetic digit corpus and prints validation error per model.

Run from the repository root:  python3 demos/04_baselines.py
"""

from sdanet.baselines import run_baseline_suite
from sdanet.datasets import synthetic_digits
from sdanet.nn import SgdConfig
from sdanet.sda import FinetuneConfig


def main():
    ds = synthetic_digits(n_samples=2100, seed=1)
    print(f"digits: {ds.n} samples, {ds.d} pixels, {ds.n_classes} classes")

    # the neural rows (logistic regression, ann) share this budget
    cfg = FinetuneConfig(SgdConfig(0.1, 20, 10, seed=5))
    suite = [
        "logistic_regression",
        "decision_tree",
        ("knn", {"k": 3}),
        "nearest_centroid",
        "gaussian_nb",
        "multinomial_nb",
        "bernoulli_nb",
        "svm",
        ("ann", {"hidden": 100}),
    ]
    rows = run_baseline_suite(ds, specs=suite, cfg=cfg, seed=2)

    print(f"\n{'model':<22} {'params':<16} {'valid %':>8}  note")
    for row in rows:
        err = "-" if row.validation_error_pct is None else f"{row.validation_error_pct:.2f}"
        params = ",".join(f"{k}={v}" for k, v in sorted(row.params.items()))
        print(f"{row.model:<22} {params:<16} {err:>8}  {row.note}")


if __name__ == "__main__":
    main()
