"""Classification and agreement statistics over ordinal labels."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import betainc


@dataclass
class EvalReport:
    accuracy: float
    macro_f1: float
    per_class_f1: list[float]
    pearson: float
    confusion: list[list[int]]  # rows = gold, columns = predicted

    @property
    def n(self) -> int:
        return int(sum(map(sum, self.confusion)))

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "per_class_f1": list(self.per_class_f1),
            "pearson": self.pearson,
            "confusion": [list(r) for r in self.confusion],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        try:
            return cls(float(d["accuracy"]), float(d["macro_f1"]), [float(x) for x in d["per_class_f1"]], float(d["pearson"]), [[int(x) for x in r] for r in d["confusion"]])
        except KeyError as exc:
            raise ValueError(f"evaluation report missing field {exc.args[0]!r}") from None


def _labels(x, n_classes):
    arr = np.asarray(x, dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= n_classes):
        raise ValueError(f"labels must lie in 0..{n_classes - 1}")
    return arr


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation. Identical inputs give exactly 1.0; otherwise a constant input gives 0.0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.array_equal(x, y):
        return 1.0
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        return 0.0
    return float(np.clip((dx @ dy) / math.sqrt(sxx * syy), -1.0, 1.0))


def evaluate(gold: Sequence[int], pred: Sequence[int], n_classes: int = 5) -> EvalReport:
    if len(gold) != len(pred):
        raise ValueError(f"gold has {len(gold)} labels but pred has {len(pred)}")
    if len(gold) == 0:
        raise ValueError("cannot evaluate an empty label list")
    g = _labels(gold, n_classes)
    p = _labels(pred, n_classes)
    conf = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(conf, (g, p), 1)
    tp = np.diag(conf).astype(float)
    # 0/0 -> 0 for precision, recall and F1
    denom = conf.sum(axis=0) + conf.sum(axis=1)
    f1 = np.divide(2 * tp, denom, out=np.zeros(n_classes), where=denom > 0)
    return EvalReport(
        accuracy=float(tp.sum() / len(g)),
        macro_f1=float(f1.mean()),
        per_class_f1=[float(v) for v in f1],
        pearson=pearson(g, p),
        confusion=conf.tolist(),
    )


def weighted_kappa(labels_a: Sequence[int], labels_b: Sequence[int], weighting: str = "linear", n_categories: int = 5) -> float:
    """Cohen's weighted kappa with disagreement weights |i-j|/(k-1) or its square."""
    if len(labels_a) != len(labels_b):
        raise ValueError("label lists differ in length")
    if len(labels_a) == 0:
        raise ValueError("cannot compute kappa of empty label lists")
    if weighting not in ("linear", "quadratic"):
        raise ValueError(f"unknown weighting {weighting!r}")
    a = _labels(labels_a, n_categories)
    b = _labels(labels_b, n_categories)
    k = n_categories
    obs = np.zeros((k, k))
    np.add.at(obs, (a, b), 1)
    exp = np.outer(obs.sum(axis=1), obs.sum(axis=0)) / len(a)
    idx = np.arange(k)
    w = np.abs(idx[:, None] - idx[None, :]) / (k - 1)
    if weighting == "quadratic":
        w = w**2
    expected = float((w * exp).sum())
    if expected == 0:
        return 1.0
    return float(1.0 - (w * obs).sum() / expected)


def welch_t(sample_a: Sequence[float], sample_b: Sequence[float]) -> tuple[float, float]:
    """Welch's unequal-variance t statistic and two-sided p-value."""
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least 2 observations")
    va, vb = a.var(ddof=1) / a.size, b.var(ddof=1) / b.size
    se2 = va + vb
    if not se2 > 0:
        raise ValueError("both samples have zero variance; t statistic undefined")
    t = float((a.mean() - b.mean()) / math.sqrt(se2))
    df = se2**2 / (va**2 / (a.size - 1) + vb**2 / (b.size - 1))
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return t, min(max(p, 0.0), 1.0)
