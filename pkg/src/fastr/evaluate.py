"""Metrics (MSE, coefficient error, AUC), k-fold cross-validation over a
(lambda, epsilon) grid, and train/test splitting."""

from dataclasses import dataclass, replace

import numpy as np
import scipy.stats

from . import estimator
from .tensor import ShapeMismatchError, frobenius_norm


@dataclass(frozen=True)
class CVGrid:
    lambdas: tuple
    epsilons: tuple
    k: int = 5

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        object.__setattr__(self, "epsilons", tuple(float(v) for v in self.epsilons))
        if not self.lambdas or any(v < 0 for v in self.lambdas):
            raise ValueError("lambdas must be non-empty with every value >= 0")
        if not self.epsilons or any(v <= 0 for v in self.epsilons):
            raise ValueError("epsilons must be non-empty with every value > 0")
        if self.k < 2:
            raise ValueError("fold count must be >= 2")


@dataclass
class CVResult:
    best_lambda: float
    best_epsilon: float
    cell_scores: np.ndarray  # len(lambdas) x len(epsilons), mean validation MSE
    fold_assignment: np.ndarray  # sample index -> fold id
    fold_scores: np.ndarray = None  # len(lambdas) x len(epsilons) x k, per-fold MSE


# default search grids; the source experiments leave the ranges unspecified
DEFAULT_LAMBDAS = tuple(np.logspace(-4, 1, 7))
DEFAULT_EPSILONS = tuple(np.logspace(-3, 2, 6))


def mse(y_hat, y):
    """Mean squared error (1/N) * sum((y_hat - y)^2)."""
    y_hat = np.asarray(y_hat, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if y_hat.shape != y.shape or y.ndim != 1 or y.size < 1:
        raise ShapeMismatchError(f"incompatible shapes {y_hat.shape}, {y.shape}")
    return float(np.mean((y_hat - y) ** 2))


def coefficient_error(w_hat, w_star):
    """Relative Frobenius error ||w_hat - w_star||_F / ||w_star||_F."""
    w_hat = np.asarray(w_hat, dtype=np.float64)
    w_star = np.asarray(w_star, dtype=np.float64)
    if w_hat.shape != w_star.shape:
        raise ShapeMismatchError(f"shapes {w_hat.shape} and {w_star.shape} differ")
    denom = frobenius_norm(w_star)
    if denom == 0.0:
        raise ZeroDivisionError("ground-truth tensor has zero norm")
    return frobenius_norm(w_hat - w_star) / denom


def auc(scores, labels):
    """Mann-Whitney AUC: P(score_pos > score_neg), ties counted as 1/2."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ShapeMismatchError("scores and labels must be equal-length vectors")
    pos = labels == np.max(labels)
    n_pos = int(pos.sum())
    n_neg = scores.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both classes must be present")
    ranks = scipy.stats.rankdata(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def encode_binary_labels(y):
    """Map a two-valued label vector to {-1, +1} (larger value -> +1)."""
    y = np.asarray(y, dtype=np.float64)
    values = np.unique(y)
    if values.size != 2:
        raise ValueError("labels must take exactly two distinct values")
    return np.where(y == values[1], 1.0, -1.0)


def fold_indices(n, k, seed):
    """Deterministic fold assignment: seeded shuffle, then contiguous blocks
    with remainder samples spread one per leading fold."""
    if k > n:
        raise ValueError("fold count exceeds sample count")
    rng = np.random.Generator(np.random.PCG64(seed))
    perm = rng.permutation(n)
    base, rem = divmod(n, k)
    assignment = np.empty(n, dtype=np.int64)
    start = 0
    for fold in range(k):
        size = base + (1 if fold < rem else 0)
        assignment[perm[start : start + size]] = fold
        start += size
    return assignment


def kfold_cv(samples, responses, grid, cfg_template):
    """Mean validation MSE per (lambda, epsilon) cell; argmin wins, ties
    broken toward larger lambda then larger epsilon."""
    samples = np.asarray(samples, dtype=np.float64)
    responses = np.asarray(responses, dtype=np.float64)
    n = samples.shape[0]
    assignment = fold_indices(n, grid.k, cfg_template.seed)

    scores = np.full((len(grid.lambdas), len(grid.epsilons)), np.inf)
    fold_scores = np.full((len(grid.lambdas), len(grid.epsilons), grid.k), np.inf)
    for li, lam in enumerate(grid.lambdas):
        for ei, eps in enumerate(grid.epsilons):
            cfg = replace(cfg_template, lam=lam, epsilon=eps)
            fold_mse = []
            for fold in range(grid.k):
                val = assignment == fold
                try:
                    report = estimator.fit(samples[~val], responses[~val], cfg)
                    y_hat = estimator.predict(report.factors, samples[val])
                except (estimator.NumericDomainError, FloatingPointError):
                    continue
                score = mse(y_hat, responses[val])
                fold_scores[li, ei, fold] = score
                fold_mse.append(score)
            if fold_mse:
                scores[li, ei] = float(np.mean(fold_mse))

    best_li, best_ei = 0, 0
    best = scores[0, 0]
    for li, lam in enumerate(grid.lambdas):
        for ei, eps in enumerate(grid.epsilons):
            s = scores[li, ei]
            better = s < best
            tie = s == best and (
                lam > grid.lambdas[best_li]
                or (lam == grid.lambdas[best_li] and eps > grid.epsilons[best_ei])
            )
            if better or tie:
                best, best_li, best_ei = s, li, ei
    return CVResult(
        best_lambda=grid.lambdas[best_li],
        best_epsilon=grid.epsilons[best_ei],
        cell_scores=scores,
        fold_assignment=assignment,
        fold_scores=fold_scores,
    )


def train_test_split(samples, responses, train_fraction, seed):
    """Seeded shuffle then exact split into train and test partitions."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    samples = np.asarray(samples, dtype=np.float64)
    responses = np.asarray(responses, dtype=np.float64)
    n = samples.shape[0]
    n_train = int(np.floor(train_fraction * n))
    if n_train < 1 or n_train >= n:
        raise ValueError("split leaves an empty partition")
    rng = np.random.Generator(np.random.PCG64(seed))
    perm = rng.permutation(n)
    tr, te = perm[:n_train], perm[n_train:]
    return (samples[tr], responses[tr]), (samples[te], responses[te])
