"""Five-class pair classification with multinomial logistic regression.

The objective is the summed cross-entropy plus ``||W||^2 / (2C)`` over the
non-bias weights (so ``C`` keeps its usual inverse-regularization meaning).
It is minimised by deterministic full-batch gradient descent with Armijo
backtracking, which makes training bitwise reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from billsim.align import FEATURE_NAMES, AlignmentParams
from billsim.metrics import evaluate

N_CLASSES = 5
CLASS_NAMES = ("Unrelated", "Partially Related", "Related", "Almost Identical", "Identical")
PROVENANCES = ("human", "synthetic", "predicted")
DEFAULT_GRID = tuple((c, norm) for norm in ("l2", "none") for c in (1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3))

MAX_ITER = 5000
REL_TOL = 1e-8


@dataclass(frozen=True)
class LabeledPair:
    id_a: str
    id_b: str
    label: int
    provenance: str = "human"
    text_a: str | None = None
    text_b: str | None = None
    probabilities: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.label not in range(N_CLASSES):
            raise ValueError(f"pair {self.id_a},{self.id_b}: label {self.label!r} not in 0..4")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.id_a == self.id_b and not (self.provenance == "synthetic" and self.label == 4):
            raise ValueError(f"pair {self.id_a}: both sides are the same subsection")

    @property
    def key(self) -> tuple[str, str]:
        return pair_key(self.id_a, self.id_b)


def pair_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class DatasetSplit:
    train: list[LabeledPair]
    validation: list[LabeledPair]
    test: list[LabeledPair]

    @classmethod
    def from_pairs(cls, pairs: Sequence[LabeledPair], seed: int, ratios=(0.7, 0.1, 0.2)) -> "DatasetSplit":
        """Seeded shuffle, then cut at rounded ratio boundaries."""
        order = np.random.default_rng(seed).permutation(len(pairs))
        shuffled = [pairs[k] for k in order]
        n_train = round(ratios[0] * len(pairs))
        n_val = round(ratios[1] * len(pairs))
        return cls(shuffled[:n_train], shuffled[n_train : n_train + n_val], shuffled[n_train + n_val :])


# -- objective -------------------------------------------------------------


def _augment(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


def _softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def loss_and_grad(W, X, y, C=1.0, norm="l2", sample_weight=None):
    """Objective value and gradient at ``W`` (classes x (features + 1), bias last)."""
    Xb = _augment(X)
    Z = Xb @ W.T
    Z = Z - Z.max(axis=1, keepdims=True)
    logsum = np.log(np.exp(Z).sum(axis=1))
    sw = np.ones(X.shape[0]) if sample_weight is None else sample_weight
    nll = float(sw @ (logsum - Z[np.arange(len(y)), y]))
    P = np.exp(Z - logsum[:, None])
    P[np.arange(len(y)), y] -= 1.0
    grad = (P * sw[:, None]).T @ Xb
    if norm == "l2":
        Wn = W[:, :-1]
        nll += float((Wn * Wn).sum()) / (2.0 * C)
        grad[:, :-1] += Wn / C
    return nll, grad


def fit(X, y, C=1.0, norm="l2", init_weights=None, sample_weight=None, n_classes=N_CLASSES, max_iter=MAX_ITER, tol=REL_TOL):
    """Minimise the objective from ``init_weights`` (zeros by default).

    Returns ``(W, history)`` where history holds the loss after every
    accepted step, preceded by the starting loss.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if norm not in ("l2", "none"):
        raise ValueError(f"norm must be 'l2' or 'none', got {norm!r}")
    if not C > 0:
        raise ValueError("C must be > 0")
    W = np.zeros((n_classes, X.shape[1] + 1)) if init_weights is None else np.array(init_weights, dtype=float)
    if W.shape != (n_classes, X.shape[1] + 1):
        raise ValueError(f"init_weights shape {W.shape} does not match {(n_classes, X.shape[1] + 1)}")
    loss, grad = loss_and_grad(W, X, y, C, norm, sample_weight)
    history = [loss]
    step = 1.0
    for _ in range(max_iter):
        g2 = float((grad * grad).sum())
        if g2 == 0.0:
            break
        t = step
        while True:
            W_new = W - t * grad
            new_loss, new_grad = loss_and_grad(W_new, X, y, C, norm, sample_weight)
            if new_loss <= loss - 1e-4 * t * g2:
                break
            t *= 0.5
            if t < 1e-30:
                return W, history
        rel = (loss - new_loss) / max(abs(loss), 1e-300)
        W, loss, grad = W_new, new_loss, new_grad
        history.append(loss)
        step = 2.0 * t
        if rel < tol:
            break
    return W, history


def inverse_frequency_weights(y, n_classes=N_CLASSES):
    counts = np.bincount(y, minlength=n_classes).astype(float)
    present = counts > 0
    w = np.zeros(n_classes)
    w[present] = len(y) / (present.sum() * counts[present])
    return w[y]


# -- model -----------------------------------------------------------------


@dataclass
class PairClassifier:
    weights: np.ndarray
    params_used: AlignmentParams = field(default_factory=AlignmentParams)
    feature_names: tuple[str, ...] = FEATURE_NAMES
    train_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (N_CLASSES, len(self.feature_names) + 1):
            raise ValueError(f"weights must be {N_CLASSES} x {len(self.feature_names) + 1}")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("model weights must be finite")

    def predict_proba(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != len(self.feature_names):
            raise ValueError(f"expected {len(self.feature_names)} features, got {X.shape[1]}")
        return _softmax(_augment(X) @ self.weights.T)

    def predict_labels(self, X) -> np.ndarray:
        # argmax returns the first maximum, i.e. the lowest class index on ties
        return self.predict_proba(X).argmax(axis=1)

    def to_dict(self) -> dict:
        return {
            "weights": [float(v) for v in self.weights.ravel()],
            "shape": list(self.weights.shape),
            "feature_names": list(self.feature_names),
            "params_used": self.params_used.to_dict(),
            "train_meta": self.train_meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PairClassifier":
        for key in ("weights", "feature_names", "params_used"):
            if key not in d:
                raise ValueError(f"model file missing field {key!r}")
        names = tuple(d["feature_names"])
        W = np.asarray(d["weights"], dtype=float).reshape(N_CLASSES, len(names) + 1)
        return cls(W, AlignmentParams(**d["params_used"]), names, dict(d.get("train_meta", {})))


def predict(model: PairClassifier, features) -> tuple[int, np.ndarray]:
    probs = model.predict_proba(features)[0]
    return int(probs.argmax()), probs


FeaturesFn = Callable[[LabeledPair], Sequence[float]]


def feature_matrix(pairs: Sequence[LabeledPair], features_fn: FeaturesFn) -> tuple[np.ndarray, np.ndarray]:
    rows = []
    for p in pairs:
        f = np.asarray(features_fn(p), dtype=float)
        if not np.all(np.isfinite(f)):
            raise ValueError(f"non-finite feature for pair {p.id_a},{p.id_b}")
        rows.append(f)
    X = np.vstack(rows) if rows else np.zeros((0, len(FEATURE_NAMES)))
    return X, np.array([p.label for p in pairs], dtype=np.int64)


def train_arrays(X, y, C=1.0, norm="l2", init_weights=None, balance=False, params=None, stage="single") -> PairClassifier:
    if len(np.unique(y)) < 2:
        raise ValueError("training data must contain at least 2 distinct labels")
    if not np.all(np.isfinite(X)):
        bad = int(np.argwhere(~np.isfinite(X))[0, 0])
        raise ValueError(f"non-finite feature in training row {bad}")
    sw = inverse_frequency_weights(y) if balance else None
    W, hist = fit(X, y, C, norm, init_weights, sw)
    meta = {
        "C": C,
        "norm": norm,
        "balance": balance,
        "stages": [{"name": stage, "n": int(len(y)), "iterations": len(hist) - 1, "initial_loss": hist[0], "final_loss": hist[-1]}],
    }
    return PairClassifier(W, params or AlignmentParams(), train_meta=meta)


def train(pairs: Sequence[LabeledPair], features_fn: FeaturesFn, C=1.0, norm="l2", init_weights=None, balance=False, params=None) -> PairClassifier:
    X, y = feature_matrix(pairs, features_fn)
    return train_arrays(X, y, C, norm, init_weights, balance, params)


def two_stage_arrays(Xs, ys, Xh, yh, C=1.0, norm="l2", balance=False, params=None) -> PairClassifier:
    if len(yh) == 0:
        raise ValueError("two-stage training needs human-labelled pairs")
    if len(ys) == 0:
        model = train_arrays(Xh, yh, C, norm, None, balance, params, stage="human")
        model.train_meta["stages"].insert(0, {"name": "synthetic", "n": 0, "skipped": True})
        return model
    first = train_arrays(Xs, ys, C, norm, None, balance, params, stage="synthetic")
    second = train_arrays(Xh, yh, C, norm, first.weights, balance, params, stage="human")
    second.train_meta["stages"] = first.train_meta["stages"] + second.train_meta["stages"]
    return second


def two_stage_train(synthetic: Sequence[LabeledPair], human: Sequence[LabeledPair], features_fn: FeaturesFn, C=1.0, norm="l2", balance=False, params=None) -> PairClassifier:
    """Fit on synthetic pairs, then continue on human pairs from those weights."""
    Xh, yh = feature_matrix(human, features_fn)
    Xs, ys = feature_matrix(synthetic, features_fn)
    return two_stage_arrays(Xs, ys, Xh, yh, C, norm, balance, params)


@dataclass
class GridResult:
    C: float
    norm: str
    cells: list[dict]
    model: PairClassifier


def _regularization_rank(C: float, norm: str) -> float:
    return math.inf if norm == "none" else C


def grid_search(split: DatasetSplit, features_fn: FeaturesFn, grid: Iterable[tuple[float, str]] = DEFAULT_GRID, synthetic: Sequence[LabeledPair] = (), balance=False, params=None) -> GridResult:
    """Pick the (C, norm) cell with the best validation macro F1.

    Ties go to the more strongly regularised cell (smaller C; ``none`` counts
    as C = infinity). With ``synthetic`` pairs every cell is trained in two
    stages.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("empty hyperparameter grid")
    Xt, yt = feature_matrix(split.train, features_fn)
    Xv, yv = feature_matrix(split.validation, features_fn)
    Xs, ys = feature_matrix(synthetic, features_fn)
    cells = []
    best = None
    for C, norm in grid:
        model = two_stage_arrays(Xs, ys, Xt, yt, C, norm, balance, params) if len(ys) else train_arrays(Xt, yt, C, norm, None, balance, params)
        rep = evaluate(yv, model.predict_labels(Xv)) if len(yv) else None
        f1 = rep.macro_f1 if rep else 0.0
        cells.append({"C": C, "norm": norm, "val_macro_f1": f1, "val_accuracy": rep.accuracy if rep else 0.0})
        key = (f1, -_regularization_rank(C, norm))
        if best is None or key > best[0]:
            best = (key, C, norm, model)
    _, C, norm, model = best
    return GridResult(C, norm, cells, model)
