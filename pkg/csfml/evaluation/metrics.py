"""
Confusion matrices, per-class rates and ROC analysis.
Rates that divide by an empty row or column are None (the undefined marker).
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from csfml.utils.errors import MetricsError


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray          # rows = true class, columns = predicted class
    class_names: Tuple[str, ...]

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=int)
        assert counts.ndim == 2 and counts.shape[0] == counts.shape[1] == len(self.class_names)
        assert np.all(counts >= 0)
        counts.setflags(write=False)
        object.__setattr__(self, 'counts', counts)
        object.__setattr__(self, 'class_names', tuple(self.class_names))

    @classmethod
    def from_predictions(cls, labels, predictions, class_names):
        K = len(class_names)
        counts = np.zeros((K, K), dtype=int)
        np.add.at(counts, (np.asarray(labels, dtype=int), np.asarray(predictions, dtype=int)), 1)
        return cls(counts=counts, class_names=tuple(class_names))

    @property
    def total(self):
        return int(self.counts.sum())

    def permute(self, order):
        """Same matrix with classes relabelled in the given order (rows and columns together)."""
        order = np.asarray(order, dtype=int)
        return ConfusionMatrix(counts=self.counts[np.ix_(order, order)],
                               class_names=tuple(self.class_names[i] for i in order))


@dataclass(frozen=True)
class ClassMetrics:
    name: str
    tpr: Optional[float]
    fnr: Optional[float]
    ppv: Optional[float]
    fdr: Optional[float]
    auc: Optional[float] = None

    def to_dict(self):
        return dict(name=self.name, tpr=self.tpr, fnr=self.fnr, ppv=self.ppv, fdr=self.fdr)


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    per_class: Tuple[ClassMetrics, ...]
    auc: Optional[float] = None

    def by_name(self, name):
        for entry in self.per_class:
            if entry.name == name:
                return entry
        raise KeyError(name)


def _ratio(numerator, denominator):
    return float(numerator) / float(denominator) if denominator > 0 else None


def metrics(cm, scores=None, labels=None):
    """
    :param cm:      ConfusionMatrix
    :param scores:  optional held-out scores (n, K) for AUC
    :param labels:  true class indices (n,), required with scores
    """
    total = cm.total
    if total == 0:
        raise MetricsError("confusion matrix is empty")
    counts = cm.counts
    diag = np.diag(counts)
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)

    class_auc = [None] * len(cm.class_names)
    overall_auc = None
    if scores is not None:
        assert labels is not None
        class_auc, overall_auc = _auc_values(np.asarray(scores, dtype=float), np.asarray(labels, dtype=int),
                                             len(cm.class_names))

    per_class = []
    for c, name in enumerate(cm.class_names):
        per_class.append(ClassMetrics(
            name=name,
            tpr=_ratio(diag[c], rows[c]),
            fnr=_ratio(rows[c] - diag[c], rows[c]),
            ppv=_ratio(diag[c], cols[c]),
            fdr=_ratio(cols[c] - diag[c], cols[c]),
            auc=class_auc[c],
        ))
    return MetricsReport(accuracy=float(diag.sum()) / total, per_class=tuple(per_class), auc=overall_auc)


def _auc_values(scores, labels, n_classes):
    """Binary: AUC of the second class. Multiclass: one-vs-rest per class and their macro average."""
    if n_classes == 2:
        value = auc(roc(scores[:, 1], labels == 1))
        return [value, value], value
    per_class = []
    for c in range(n_classes):
        try:
            per_class.append(auc(roc(scores[:, c], labels == c)))
        except MetricsError:
            per_class.append(None)
    defined = [v for v in per_class if v is not None]
    return per_class, (float(np.mean(defined)) if defined else None)


@dataclass(frozen=True)
class RocCurve:
    points: np.ndarray      # (m, 3) rows of (fpr, tpr, threshold)

    @property
    def fpr(self):
        return self.points[:, 0]

    @property
    def tpr(self):
        return self.points[:, 1]

    @property
    def thresholds(self):
        return self.points[:, 2]


def roc(scores, labels):
    """
    Staircase ROC over the distinct score values in descending order, starting
    at (0, 0) with an infinite threshold. Tied scores enter together.

    :param scores:  positive-class score per row
    :param labels:  truthy for positive rows
    """
    scores = np.asarray(scores, dtype=float)
    positive = np.asarray(labels).astype(bool)
    n_pos = int(positive.sum())
    n_neg = positive.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricsError("ROC needs at least one positive and one negative row")

    order = np.argsort(-scores, kind='stable')
    sorted_scores = scores[order]
    tps = np.cumsum(positive[order])
    fps = np.cumsum(~positive[order])
    last = np.r_[np.flatnonzero(np.diff(sorted_scores) != 0), positive.size - 1]

    points = np.empty((last.size + 1, 3))
    points[0] = (0.0, 0.0, np.inf)
    points[1:, 0] = fps[last] / n_neg
    points[1:, 1] = tps[last] / n_pos
    points[1:, 2] = sorted_scores[last]
    return RocCurve(points=points)


def auc(curve):
    x, y = curve.fpr, curve.tpr
    return float(np.sum((x[1:] - x[:-1]) * (y[1:] + y[:-1]) * 0.5))


def one_vs_rest_rocs(scores, labels, class_names):
    """ROC curve of every class against the rest; classes missing from labels are left out."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    curves = {}
    for c, name in enumerate(class_names):
        try:
            curves[name] = roc(scores[:, c], labels == c)
        except MetricsError:
            continue
    return curves
