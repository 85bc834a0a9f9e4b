"""The five classical classifiers: CART decision tree, linear SVM with
per-class sigmoid probability calibration, multinomial logistic regression,
KNN, and multinomial naive Bayes.

All models share one contract: train on dense count matrices, predict a
:class:`Prediction` whose distribution sums to 1 and whose label is the
lowest index achieving the maximum. Every tie anywhere (split candidates,
neighbors, votes) breaks toward the lowest index, so training and prediction
are reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, ShapeError, TrainingError
from .numerics import SeededRng, argmax_tiebreak, sigmoid, softmax_rows
from .textprep import CountVector

__all__ = [
    "DecisionTreeModel",
    "KnnModel",
    "LinearSvmModel",
    "LogisticRegressionModel",
    "MultinomialNbModel",
    "Prediction",
    "dt_train",
    "knn_fit",
    "knn_predict",
    "lr_loss_and_grad",
    "lr_train",
    "mnb_train",
    "predict",
    "svm_hinge_objective",
    "svm_predict_proba",
    "svm_train",
]


@dataclass(frozen=True)
class Prediction:
    label: int
    distribution: np.ndarray


def as_matrix(x) -> np.ndarray:
    """Dense float64 design matrix from CountVectors or array-likes."""
    if isinstance(x, (list, tuple)) and x and isinstance(x[0], CountVector):
        return np.stack([v.to_dense() for v in x])
    return np.asarray(x, dtype=np.float64)


def _as_row(x, n_features: int) -> np.ndarray:
    if isinstance(x, CountVector):
        dense = x.to_dense()
    else:
        dense = np.asarray(x, dtype=np.float64).reshape(-1)
    if dense.shape[0] != n_features:
        raise ShapeError(f"input has {dense.shape[0]} features, model expects "
                         f"{n_features}")
    return dense


def _check_train(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[0] == 0:
        raise TrainingError("empty training set")
    if x.shape[0] != y.shape[0]:
        raise ShapeError(f"{x.shape[0]} rows but {y.shape[0]} labels")


# ---------------------------------------------------------------------------
# Decision tree (CART, Gini impurity)
# ---------------------------------------------------------------------------

@dataclass
class _TreeNode:
    feature: int = -1
    threshold: float = 0.0
    left: "_TreeNode | None" = None
    right: "_TreeNode | None" = None
    counts: np.ndarray | None = None  # per-class training counts at a leaf

    def is_leaf(self) -> bool:
        return self.counts is not None


@dataclass
class DecisionTreeModel:
    root: _TreeNode
    n_features: int
    n_classes: int
    max_depth: int | None
    min_samples_split: int

    def depth(self) -> int:
        def walk(node: _TreeNode) -> int:
            if node.is_leaf():
                return 0
            return 1 + max(walk(node.left), walk(node.right))
        return walk(self.root)


def _gini_from_counts(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - np.dot(p, p))


def _best_split(x: np.ndarray, y: np.ndarray, n_classes: int,
                ) -> tuple[int, float] | None:
    """(feature, threshold) minimizing weighted child Gini.

    Thresholds are midpoints between adjacent distinct values; ties break to
    the lowest feature index, then the lowest threshold. Returns None when no
    feature has two distinct values.
    """
    n = x.shape[0]
    best: tuple[int, float] | None = None
    best_score = np.inf
    one_hot = np.zeros((n, n_classes), dtype=np.float64)
    one_hot[np.arange(n), y] = 1.0
    for feat in range(x.shape[1]):
        col = x[:, feat]
        order = np.argsort(col, kind="stable")
        sorted_vals = col[order]
        boundaries = np.nonzero(sorted_vals[:-1] != sorted_vals[1:])[0]
        if boundaries.size == 0:
            continue
        cum = np.cumsum(one_hot[order], axis=0)
        left_counts = cum[boundaries]
        total = cum[-1]
        right_counts = total - left_counts
        n_left = (boundaries + 1).astype(np.float64)
        n_right = n - n_left
        gini_left = 1.0 - np.sum((left_counts / n_left[:, None]) ** 2, axis=1)
        gini_right = 1.0 - np.sum((right_counts / n_right[:, None]) ** 2, axis=1)
        weighted = (n_left * gini_left + n_right * gini_right) / n
        for pos in range(weighted.shape[0]):  # ascending thresholds
            if weighted[pos] < best_score:
                best_score = weighted[pos]
                i = boundaries[pos]
                best = (feat, float((sorted_vals[i] + sorted_vals[i + 1]) / 2.0))
    return best


def dt_train(train_x, train_y, n_classes: int | None = None,
             max_depth: int | None = None, min_samples_split: int = 2,
             criterion: str = "gini") -> DecisionTreeModel:
    """Greedy recursive binary splitting; stops at purity, depth, or size."""
    if criterion != "gini":
        raise ValueError(f"unsupported criterion {criterion!r}")
    x = as_matrix(train_x)
    y = np.asarray(train_y, dtype=np.int64)
    _check_train(x, y)
    if n_classes is None:
        n_classes = int(y.max()) + 1

    def grow(rows: np.ndarray, depth: int) -> _TreeNode:
        counts = np.bincount(y[rows], minlength=n_classes).astype(np.float64)
        stop = (np.count_nonzero(counts) <= 1
                or rows.shape[0] < min_samples_split
                or (max_depth is not None and depth >= max_depth))
        if not stop:
            split = _best_split(x[rows], y[rows], n_classes)
            if split is not None:
                feat, thr = split
                mask = x[rows, feat] <= thr
                node = _TreeNode(feature=feat, threshold=thr)
                node.left = grow(rows[mask], depth + 1)
                node.right = grow(rows[~mask], depth + 1)
                return node
        return _TreeNode(counts=counts)

    root = grow(np.arange(x.shape[0]), 0)
    return DecisionTreeModel(root, x.shape[1], n_classes, max_depth,
                             min_samples_split)


def _dt_predict(model: DecisionTreeModel, dense: np.ndarray) -> Prediction:
    node = model.root
    while not node.is_leaf():
        node = node.left if dense[node.feature] <= node.threshold else node.right
    distribution = node.counts / node.counts.sum()
    return Prediction(argmax_tiebreak(distribution), distribution)


# ---------------------------------------------------------------------------
# K-nearest neighbors
# ---------------------------------------------------------------------------

@dataclass
class KnnModel:
    x: np.ndarray
    y: np.ndarray
    k: int
    n_classes: int


def knn_fit(train_x, train_y, k: int = 3,
            n_classes: int | None = None) -> KnnModel:
    x = as_matrix(train_x)
    y = np.asarray(train_y, dtype=np.int64)
    _check_train(x, y)
    if not 1 <= k <= x.shape[0]:
        raise TrainingError(f"k={k} outside [1, {x.shape[0]}]")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    return KnnModel(x, y, k, n_classes)


def knn_predict(model: KnnModel, x) -> Prediction:
    """Uniform vote of the k nearest by Euclidean distance; distance ties go
    to the lower training index, vote ties to the lower label code."""
    dense = _as_row(x, model.x.shape[1])
    diff = model.x - dense
    dist2 = np.einsum("ij,ij->i", diff, diff)
    order = np.argsort(dist2, kind="stable")[:model.k]
    votes = np.bincount(model.y[order], minlength=model.n_classes)
    distribution = votes / model.k
    return Prediction(argmax_tiebreak(distribution), distribution)


# ---------------------------------------------------------------------------
# Multinomial naive Bayes
# ---------------------------------------------------------------------------

@dataclass
class MultinomialNbModel:
    log_prior: np.ndarray       # (C,)
    log_likelihood: np.ndarray  # (C, F)
    alpha: float


def mnb_train(train_x, train_y, alpha: float = 1.0,
              n_classes: int | None = None) -> MultinomialNbModel:
    """Laplace-smoothed multinomial likelihoods, all in log space."""
    if alpha <= 0:
        raise ValueError(f"smoothing alpha must be positive, got {alpha}")
    x = as_matrix(train_x)
    y = np.asarray(train_y, dtype=np.int64)
    _check_train(x, y)
    if n_classes is None:
        n_classes = int(y.max()) + 1
    n_features = x.shape[1]
    doc_counts = np.bincount(y, minlength=n_classes).astype(np.float64)
    feature_counts = np.zeros((n_classes, n_features), dtype=np.float64)
    for c in range(n_classes):
        rows = y == c
        if rows.any():
            feature_counts[c] = x[rows].sum(axis=0)
    with np.errstate(divide="ignore"):
        log_prior = np.log(doc_counts / y.shape[0])
    totals = feature_counts.sum(axis=1, keepdims=True)
    log_likelihood = (np.log(feature_counts + alpha)
                      - np.log(totals + alpha * n_features))
    return MultinomialNbModel(log_prior, log_likelihood, alpha)


def _mnb_predict(model: MultinomialNbModel, dense: np.ndarray) -> Prediction:
    joint = model.log_prior + model.log_likelihood @ dense
    shifted = joint - joint.max()
    posterior = np.exp(shifted)
    posterior /= posterior.sum()
    return Prediction(argmax_tiebreak(posterior), posterior)


# ---------------------------------------------------------------------------
# Multinomial logistic regression (softmax, full-batch gradient descent)
# ---------------------------------------------------------------------------

@dataclass
class LogisticRegressionModel:
    weights: np.ndarray  # (C, F)
    bias: np.ndarray     # (C,)
    seed: int
    lam: float
    loss_history: list[float] = field(default_factory=list, repr=False)


def lr_loss_and_grad(weights: np.ndarray, bias: np.ndarray, x: np.ndarray,
                     y: np.ndarray, lam: float,
                     ) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy + (lam/2)*||W||^2 with its analytic gradient."""
    n = x.shape[0]
    probs = softmax_rows(x @ weights.T + bias)
    loss = float(-np.mean(np.log(probs[np.arange(n), y] + 1e-300))
                 + 0.5 * lam * np.sum(weights * weights))
    grad = probs
    grad[np.arange(n), y] -= 1.0
    grad /= n
    d_weights = grad.T @ x + lam * weights
    d_bias = grad.sum(axis=0)
    return loss, d_weights, d_bias


def lr_train(train_x, train_y, n_classes: int | None = None,
             learning_rate: float = 0.1, max_iters: int = 2000,
             tolerance: float = 1e-7, lam: float = 1e-4,
             seed: int = 10) -> LogisticRegressionModel:
    """Full-batch descent from a small seeded-uniform start; stops when the
    loss improvement drops below the tolerance."""
    if learning_rate <= 0:
        raise ValueError("learning_rate must be positive")
    x = as_matrix(train_x)
    y = np.asarray(train_y, dtype=np.int64)
    _check_train(x, y)
    if n_classes is None:
        n_classes = int(y.max()) + 1
    rng = SeededRng(seed)
    weights = rng.random_array((n_classes, x.shape[1]), -0.01, 0.01)
    bias = np.zeros(n_classes, dtype=np.float64)
    history: list[float] = []
    previous = np.inf
    for _ in range(max_iters):
        with np.errstate(over="ignore", invalid="ignore"):
            loss, d_weights, d_bias = lr_loss_and_grad(weights, bias, x, y, lam)
        if not np.isfinite(loss):
            raise DivergenceError(
                "loss became non-finite; try a smaller learning_rate")
        history.append(loss)
        weights -= learning_rate * d_weights
        bias -= learning_rate * d_bias
        if previous - loss < tolerance:
            break
        previous = loss
    return LogisticRegressionModel(weights, bias, seed, lam, history)


def _lr_predict(model: LogisticRegressionModel, dense: np.ndarray) -> Prediction:
    scores = model.weights @ dense + model.bias
    distribution = softmax_rows(scores[None, :])[0]
    return Prediction(argmax_tiebreak(distribution), distribution)


# ---------------------------------------------------------------------------
# Linear SVM, one-vs-rest, with sigmoid score calibration
# ---------------------------------------------------------------------------

@dataclass
class LinearSvmModel:
    weights: np.ndarray      # (C, F)
    bias: np.ndarray         # (C,)
    calibration: np.ndarray  # (C, 2): per-class (A, B)
    lam: float


def svm_hinge_objective(w: np.ndarray, b: float, x: np.ndarray,
                        t: np.ndarray, lam: float,
                        ) -> tuple[float, np.ndarray, float]:
    """Mean hinge loss + (lam/2)*||w||^2 with the subgradient that treats
    margins >= 1 as inactive."""
    margins = t * (x @ w + b)
    viol = margins < 1.0
    loss = float(np.mean(np.maximum(0.0, 1.0 - margins))
                 + 0.5 * lam * np.dot(w, w))
    n = x.shape[0]
    if viol.any():
        d_w = lam * w - (t[viol] @ x[viol]) / n
        d_b = -float(t[viol].sum()) / n
    else:
        d_w = lam * w
        d_b = 0.0
    return loss, d_w, d_b


def _stable_logistic_loss(z: np.ndarray, targets: np.ndarray) -> float:
    # mean(log(1+e^z) - targets*z), computed without overflow
    return float(np.mean(np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))
                         - targets * z))


def _fit_sigmoid(scores: np.ndarray, targets: np.ndarray,
                 max_iters: int = 100) -> tuple[float, float]:
    """Newton fit of sigmoid(A*s + B) to 0/1 targets (damped, deterministic)."""
    a, b = 0.0, 0.0
    loss = _stable_logistic_loss(a * scores + b, targets)
    n = scores.shape[0]
    for _ in range(max_iters):
        z = a * scores + b
        p = sigmoid(z)
        g = p - targets
        grad_a = float(g @ scores) / n
        grad_b = float(g.sum()) / n
        w = p * (1.0 - p)
        h_aa = float(w @ (scores * scores)) / n + 1e-12
        h_ab = float(w @ scores) / n
        h_bb = float(w.sum()) / n + 1e-12
        det = h_aa * h_bb - h_ab * h_ab
        if det <= 0:
            break
        step_a = (h_bb * grad_a - h_ab * grad_b) / det
        step_b = (h_aa * grad_b - h_ab * grad_a) / det
        scale = 1.0
        improved = False
        for _ in range(30):
            cand = _stable_logistic_loss((a - scale * step_a) * scores
                                         + (b - scale * step_b), targets)
            if cand <= loss:
                a -= scale * step_a
                b -= scale * step_b
                improved = cand < loss - 1e-14
                loss = cand
                break
            scale *= 0.5
        if not improved:
            break
    return a, b


def svm_train(train_x, train_y, n_classes: int | None = None,
              learning_rate: float = 0.1, epochs: int = 1000,
              lam: float = 1e-4) -> LinearSvmModel:
    """One-vs-rest hinge minimization by deterministic full-batch subgradient
    descent, then per-class sigmoid calibration on the training scores."""
    x = as_matrix(train_x)
    y = np.asarray(train_y, dtype=np.int64)
    _check_train(x, y)
    if np.unique(y).shape[0] < 2:
        raise TrainingError("SVM training needs at least 2 classes")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    n_features = x.shape[1]
    weights = np.zeros((n_classes, n_features), dtype=np.float64)
    bias = np.zeros(n_classes, dtype=np.float64)
    calibration = np.zeros((n_classes, 2), dtype=np.float64)
    for c in range(n_classes):
        t = np.where(y == c, 1.0, -1.0)
        w = np.zeros(n_features, dtype=np.float64)
        b = 0.0
        for _ in range(epochs):
            _, d_w, d_b = svm_hinge_objective(w, b, x, t, lam)
            w -= learning_rate * d_w
            b -= learning_rate * d_b
        weights[c] = w
        bias[c] = b
        scores = x @ w + b
        calibration[c] = _fit_sigmoid(scores, (t > 0).astype(np.float64))
    return LinearSvmModel(weights, bias, calibration, lam)


def svm_predict_proba(model: LinearSvmModel, x) -> Prediction:
    """Calibrated per-class probabilities, renormalized to sum to 1."""
    dense = _as_row(x, model.weights.shape[1])
    scores = model.weights @ dense + model.bias
    probs = sigmoid(model.calibration[:, 0] * scores + model.calibration[:, 1])
    distribution = probs / probs.sum()
    return Prediction(argmax_tiebreak(distribution), distribution)


# ---------------------------------------------------------------------------
# Uniform facade
# ---------------------------------------------------------------------------

def predict(model, x) -> Prediction:
    """Dispatch to the model-specific predictor; every path returns a
    distribution summing to 1 with the argmax-lowest-index label."""
    if isinstance(model, DecisionTreeModel):
        return _dt_predict(model, _as_row(x, model.n_features))
    if isinstance(model, KnnModel):
        return knn_predict(model, x)
    if isinstance(model, MultinomialNbModel):
        return _mnb_predict(model, _as_row(x, model.log_likelihood.shape[1]))
    if isinstance(model, LogisticRegressionModel):
        return _lr_predict(model, _as_row(x, model.weights.shape[1]))
    if isinstance(model, LinearSvmModel):
        return svm_predict_proba(model, x)
    raise TypeError(f"not a classical model: {type(model).__name__}")
