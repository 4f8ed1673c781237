"""Kernel-machine training: dual SVM, one-vs-one multiclass, kernel ridge
regression, and repeated randomized cross-validation with a C grid search.

The SVM solves the box-constrained dual

    min_α ½ αᵀQα − eᵀα,   Q_ij = y_i y_j K_ij,   0 ≤ α ≤ C,   Σ y_i α_i = 0

by sequential minimal optimization on the maximal-violating pair: each step
picks the most infeasible (i, j) by the KKT gap, solves the two-variable
subproblem in closed form, and updates the gradient. The equality constraint
is preserved exactly at every step, so feasibility never drifts.

A note on the bias: the decision function includes an intercept b recovered
from the free support vectors (averaged), since the dual's equality
constraint is precisely the optimality condition for one. Formulations that
drop b would leave that constraint unmotivated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .kernels import KernelMatrix

__all__ = [
    "SVMModel",
    "OneVsOneModel",
    "KRRModel",
    "CVReport",
    "svm_train",
    "svm_decision",
    "svm_predict",
    "one_vs_one",
    "krr_train",
    "krr_predict",
    "cross_validate",
    "DEFAULT_C_GRID",
    "CLASSICAL_C_GRID",
]

DEFAULT_C_GRID = tuple(np.logspace(-3, 3, 7))
CLASSICAL_C_GRID = tuple(np.logspace(-3, -1, 3))
_SV_EPS = 1e-12


def _as_array(kernel) -> np.ndarray:
    if isinstance(kernel, KernelMatrix):
        return kernel.values
    return np.asarray(kernel, dtype=float)


@dataclass
class SVMModel:
    alphas: np.ndarray
    bias: float
    labels: np.ndarray  # ±1 per training point
    support_indices: np.ndarray
    C: float
    converged: bool
    n_updates: int

    def __post_init__(self):
        if np.any(self.alphas < -_SV_EPS) or np.any(self.alphas > self.C + _SV_EPS):
            raise ValueError("alphas violate the box constraint")


def svm_train(
    kernel,
    y,
    C: float = 1.0,
    tol: float = 1e-3,
    max_updates: int = 100_000,
) -> SVMModel:
    """Fit the dual SVM on a precomputed kernel matrix.

    ``y`` must be ±1 and contain both labels; ``tol`` bounds the final KKT
    violation gap m − M. Convergence status and the number of pair updates
    are recorded on the model rather than raising, so callers can decide how
    strict to be.
    """
    k = _as_array(kernel)
    y = np.asarray(y, dtype=float)
    n = y.size
    if k.shape != (n, n):
        raise ValueError(f"kernel shape {k.shape} does not match {n} labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be ±1")
    if np.all(y == y[0]):
        raise ValueError("training set contains a single class")
    if C <= 0:
        raise ValueError("C must be positive")

    q = (y[:, None] * y[None, :]) * k
    alpha = np.zeros(n)
    grad = -np.ones(n)  # ∇(½αᵀQα − eᵀα) at α = 0
    pos = y > 0
    converged = False
    updates = 0
    while updates < max_updates:
        up = (pos & (alpha < C - _SV_EPS)) | (~pos & (alpha > _SV_EPS))
        low = (~pos & (alpha < C - _SV_EPS)) | (pos & (alpha > _SV_EPS))
        if not up.any() or not low.any():
            converged = True
            break
        score = -y * grad
        i = np.flatnonzero(up)[np.argmax(score[up])]
        j = np.flatnonzero(low)[np.argmin(score[low])]
        m, big_m = score[i], score[j]
        if m - big_m <= tol:
            converged = True
            break
        a = max(k[i, i] + k[j, j] - 2.0 * k[i, j], 1e-12)
        delta = (m - big_m) / a
        delta = min(delta, C - alpha[i] if y[i] > 0 else alpha[i])
        delta = min(delta, alpha[j] if y[j] > 0 else C - alpha[j])
        d_i = y[i] * delta
        d_j = -y[j] * delta
        alpha[i] += d_i
        alpha[j] += d_j
        grad += q[:, i] * d_i + q[:, j] * d_j
        updates += 1

    score = -y * grad
    free = (alpha > _SV_EPS) & (alpha < C - _SV_EPS)
    if free.any():
        bias = float(np.mean(score[free]))
    else:
        up = (pos & (alpha < C - _SV_EPS)) | (~pos & (alpha > _SV_EPS))
        low = (~pos & (alpha < C - _SV_EPS)) | (pos & (alpha > _SV_EPS))
        hi = score[up].max() if up.any() else 0.0
        lo = score[low].min() if low.any() else 0.0
        bias = float(0.5 * (hi + lo))
    alpha = np.clip(alpha, 0.0, C)
    return SVMModel(
        alphas=alpha,
        bias=bias,
        labels=y,
        support_indices=np.flatnonzero(alpha > _SV_EPS),
        C=C,
        converged=converged,
        n_updates=updates,
    )


def svm_decision(model: SVMModel, k_rows) -> np.ndarray | float:
    """Decision value Σ_i y_i α_i K(x, x_i) + b for one row or a batch."""
    rows = np.atleast_2d(np.asarray(k_rows, dtype=float))
    if rows.shape[1] != model.labels.size:
        raise ValueError(
            f"kernel row length {rows.shape[1]} does not match "
            f"{model.labels.size} training points"
        )
    vals = rows @ (model.alphas * model.labels) + model.bias
    return float(vals[0]) if np.ndim(k_rows) == 1 else vals


def svm_predict(model: SVMModel, k_rows) -> np.ndarray | int:
    """±1 prediction; an exact zero decision value resolves to +1."""
    vals = svm_decision(model, k_rows)
    if np.ndim(k_rows) == 1:
        return 1 if vals >= 0 else -1
    return np.where(np.asarray(vals) >= 0, 1, -1)


@dataclass
class OneVsOneModel:
    classes: np.ndarray
    pair_models: dict = field(default_factory=dict)  # (a, b) -> (SVMModel, indices)

    def predict(self, k_rows) -> np.ndarray:
        """Plurality vote over all pairwise classifiers; ties go to the
        lowest class id. ``k_rows`` holds kernel values against the full
        training set, one row per test point."""
        rows = np.atleast_2d(np.asarray(k_rows, dtype=float))
        votes = np.zeros((rows.shape[0], self.classes.size), dtype=np.int64)
        index_of = {c: t for t, c in enumerate(self.classes)}
        for (a, b), (model, idx) in self.pair_models.items():
            pred = svm_predict(model, rows[:, idx])
            votes[:, index_of[a]] += pred == 1
            votes[:, index_of[b]] += pred == -1
        return self.classes[np.argmax(votes, axis=1)]


def one_vs_one(kernel, y, C: float = 1.0, tol: float = 1e-3) -> OneVsOneModel:
    """Train n_c(n_c−1)/2 binary machines, one per unordered class pair.

    Within a pair (a, b) with a < b, class a plays the +1 role.
    """
    k = _as_array(kernel)
    y = np.asarray(y)
    classes = np.unique(y)
    if classes.size < 2:
        raise ValueError("need at least two classes")
    model = OneVsOneModel(classes=classes)
    for t, a in enumerate(classes):
        for b in classes[t + 1 :]:
            idx = np.flatnonzero((y == a) | (y == b))
            sub_y = np.where(y[idx] == a, 1.0, -1.0)
            sub_k = k[np.ix_(idx, idx)]
            model.pair_models[(a, b)] = (svm_train(sub_k, sub_y, C, tol), idx)
    return model


@dataclass
class KRRModel:
    weights: np.ndarray
    ridge: float


def krr_train(kernel, y, ridge: float) -> KRRModel:
    """Solve (K + λI)a = y by Cholesky factorization."""
    k = _as_array(kernel)
    y = np.asarray(y, dtype=float)
    if ridge <= 0:
        raise ValueError("ridge must be positive")
    if not (np.all(np.isfinite(k)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite values in kernel or targets")
    factor = cho_factor(k + ridge * np.eye(y.size), lower=True)
    return KRRModel(weights=cho_solve(factor, y), ridge=ridge)


def krr_predict(model: KRRModel, k_rows) -> np.ndarray | float:
    """Prediction Σ_i a_i K(x, x_i)."""
    rows = np.atleast_2d(np.asarray(k_rows, dtype=float))
    vals = rows @ model.weights
    return float(vals[0]) if np.ndim(k_rows) == 1 else vals


@dataclass
class CVReport:
    """Results of repeated k-fold cross-validation with a C grid.

    Two selection protocols are reported. The headline numbers pick one C by
    the best mean accuracy over every (repeat, fold) split — ``chosen_C`` —
    and average that column. ``per_split_best`` instead lets every split pick
    its own best C (``chosen_C_per_split``), an optimistic upper bound kept
    for diagnostics.
    """

    mean_accuracy: float
    std_accuracy: float
    chosen_C: float
    per_split: np.ndarray  # accuracies at chosen_C, shape (repeats*folds,)
    per_split_best: np.ndarray
    chosen_C_per_split: np.ndarray
    mean_accuracy_best: float
    std_accuracy_best: float
    c_grid: tuple
    folds: int
    repeats: int
    seed: int
    flagged_splits: list  # (repeat, fold) where the training part lost a class

    def to_json_dict(self) -> dict:
        return {
            "mean_accuracy": self.mean_accuracy,
            "std_accuracy": self.std_accuracy,
            "chosen_C": self.chosen_C,
            "per_split": self.per_split.tolist(),
            "per_split_best": self.per_split_best.tolist(),
            "chosen_C_per_split": self.chosen_C_per_split.tolist(),
            "mean_accuracy_best": self.mean_accuracy_best,
            "std_accuracy_best": self.std_accuracy_best,
            "c_grid": list(self.c_grid),
            "folds": self.folds,
            "repeats": self.repeats,
            "seed": self.seed,
            "flagged_splits": self.flagged_splits,
        }


def cross_validate(
    kernel,
    y,
    folds: int = 10,
    repeats: int = 10,
    c_grid=DEFAULT_C_GRID,
    seed: int = 0,
    tol: float = 1e-3,
) -> CVReport:
    """Repeated randomized k-fold CV of a one-vs-one SVM on a fixed kernel.

    Splits are plain random permutations — not stratified — chopped into
    near-equal folds. A training part that degenerates to a single class is
    scored by majority vote and flagged rather than aborting the run.
    Deterministic for a fixed seed.
    """
    k = _as_array(kernel)
    y = np.asarray(y)
    n = y.size
    if k.shape != (n, n):
        raise ValueError("kernel/label size mismatch")
    if not 2 <= folds <= n:
        raise ValueError(f"cannot split {n} samples into {folds} folds")
    c_grid = tuple(float(c) for c in c_grid)
    if not c_grid:
        raise ValueError("empty C grid")

    acc = np.zeros((repeats, folds, len(c_grid)))
    flagged: list[tuple[int, int]] = []
    seeds = np.random.SeedSequence(seed).spawn(repeats)
    for r in range(repeats):
        rng = np.random.default_rng(seeds[r])
        perm = rng.permutation(n)
        parts = np.array_split(perm, folds)
        for f, test in enumerate(parts):
            train = np.concatenate([p for t, p in enumerate(parts) if t != f])
            y_train, y_test = y[train], y[test]
            if np.unique(y_train).size < 2:
                values, counts = np.unique(y_train, return_counts=True)
                majority = values[np.argmax(counts)]
                acc[r, f, :] = np.mean(y_test == majority)
                flagged.append((r, f))
                continue
            k_train = k[np.ix_(train, train)]
            k_test = k[np.ix_(test, train)]
            for ci, c_val in enumerate(c_grid):
                model = one_vs_one(k_train, y_train, C=c_val, tol=tol)
                pred = model.predict(k_test)
                acc[r, f, ci] = np.mean(pred == y_test)

    flat = acc.reshape(repeats * folds, len(c_grid))
    mean_by_c = flat.mean(axis=0)
    best_c_idx = int(np.argmax(mean_by_c))  # ties resolve to the smallest C
    per_split = flat[:, best_c_idx]
    per_split_best = flat.max(axis=1)
    chosen_per_split = np.array([c_grid[i] for i in np.argmax(flat, axis=1)])
    return CVReport(
        mean_accuracy=float(per_split.mean()),
        std_accuracy=float(per_split.std()),
        chosen_C=c_grid[best_c_idx],
        per_split=per_split,
        per_split_best=per_split_best,
        chosen_C_per_split=chosen_per_split,
        mean_accuracy_best=float(per_split_best.mean()),
        std_accuracy_best=float(per_split_best.std()),
        c_grid=c_grid,
        folds=folds,
        repeats=repeats,
        seed=seed,
        flagged_splits=flagged,
    )
