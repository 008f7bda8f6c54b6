"""
Model specifications and the uniform trained-model contract.
Every estimator exposes predict_proba(X) -> (n, K) scores over class indices;
TrainedModel adds the training-split standardization and the class names.
"""

import enum
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from csfml.utils.errors import ModelSpecError, UnknownModelError


class ModelKind(str, enum.Enum):
    LOGISTIC = 'logistic'
    NB_GAUSS = 'nb-gauss'
    NB_KERNEL = 'nb-kernel'
    SVM_LINEAR = 'svm-linear'
    SVM_QUADRATIC = 'svm-quadratic'
    KNN_COARSE = 'knn-coarse'
    KNN_COSINE = 'knn-cosine'
    BOOSTED = 'boosted'
    BAGGED = 'bagged'
    RUSBOOST = 'rusboost'

    @classmethod
    def from_token(cls, token):
        try:
            return cls(token)
        except ValueError:
            raise UnknownModelError("unknown model '%s' (choose from %s)" %
                                    (token, '|'.join(k.value for k in cls)))


MODEL_TITLES = {
    ModelKind.BOOSTED: 'Ensemble (Boosted Tree)',
    ModelKind.NB_GAUSS: 'Naive Bayes (Gaussian)',
    ModelKind.NB_KERNEL: 'Naive Bayes (Kernel)',
    ModelKind.SVM_LINEAR: 'SVM (Linear)',
    ModelKind.SVM_QUADRATIC: 'SVM (Quadratic)',
    ModelKind.KNN_COARSE: 'KNN (Coarse)',
    ModelKind.KNN_COSINE: 'KNN (Cosine)',
    ModelKind.LOGISTIC: 'Logistic Regression',
    ModelKind.BAGGED: 'Ensemble (Bagged Tree)',
    ModelKind.RUSBOOST: 'Ensemble (RUS Boosted Tree)',
}

# kinds fit on z-scored features; cosine knn and trees see raw features
STANDARDIZED_KINDS = frozenset({ModelKind.LOGISTIC, ModelKind.NB_GAUSS, ModelKind.NB_KERNEL,
                                ModelKind.SVM_LINEAR, ModelKind.SVM_QUADRATIC, ModelKind.KNN_COARSE})
TREE_KINDS = frozenset({ModelKind.BOOSTED, ModelKind.BAGGED, ModelKind.RUSBOOST})

DEFAULT_K = {ModelKind.KNN_COARSE: 100, ModelKind.KNN_COSINE: 10}
DEFAULT_MAX_DEPTH = {ModelKind.BOOSTED: 3, ModelKind.RUSBOOST: 3, ModelKind.BAGGED: 0}


@dataclass(frozen=True)
class Hyperparameters:
    """
    :param C:               svm box constraint
    :param lam:             logistic regression L2 penalty
    :param k:               knn neighbours (None: 100 coarse, 10 cosine)
    :param rounds:          boosting rounds / number of bags
    :param max_depth:       tree depth limit, 0 = unlimited (None: 3 boosted, unlimited bagged)
    :param min_leaf:        minimum samples per tree leaf
    :param max_iter:        IRLS iteration cap
    :param tol:             IRLS weight-change tolerance
    :param svm_tol:         SMO KKT violation tolerance
    :param svm_max_iter:    SMO iteration cap
    """
    C: float = 1.0
    lam: float = 1e-4
    k: Optional[int] = None
    rounds: int = 30
    max_depth: Optional[int] = None
    min_leaf: int = 1
    max_iter: int = 100
    tol: float = 1e-8
    svm_tol: float = 1e-6
    svm_max_iter: int = 200000

    def __post_init__(self):
        checks = [
            (self.C > 0, "C must be positive"),
            (self.lam > 0, "lam must be positive"),
            (self.k is None or self.k >= 1, "k must be >= 1"),
            (self.rounds >= 1, "rounds must be >= 1"),
            (self.max_depth is None or self.max_depth >= 0, "max_depth must be >= 0"),
            (self.min_leaf >= 1, "min_leaf must be >= 1"),
            (self.max_iter >= 1, "max_iter must be >= 1"),
            (self.tol > 0 and self.svm_tol > 0, "tolerances must be positive"),
            (self.svm_max_iter >= 1, "svm_max_iter must be >= 1"),
        ]
        for ok, message in checks:
            if not ok:
                raise ModelSpecError(message)


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    hyperparameters: Hyperparameters = field(default_factory=Hyperparameters)
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.kind, ModelKind):
            object.__setattr__(self, 'kind', ModelKind.from_token(self.kind))

    @property
    def k(self):
        hp = self.hyperparameters
        return hp.k if hp.k is not None else DEFAULT_K.get(self.kind, 10)

    @property
    def max_depth(self):
        """Effective depth limit, None when unlimited."""
        hp = self.hyperparameters
        depth = hp.max_depth if hp.max_depth is not None else DEFAULT_MAX_DEPTH.get(self.kind, 0)
        return None if depth == 0 else depth

    def with_seed(self, seed):
        return replace(self, seed=int(seed))


@dataclass(frozen=True)
class Standardizer:
    in_shift: np.ndarray
    in_scale: np.ndarray

    @classmethod
    def fit(cls, X):
        X = np.asarray(X, dtype=float)
        in_shift, in_scale = np.mean(X, axis=0), np.std(X, axis=0)
        in_scale = np.where(in_scale > 0, in_scale, 1.0)
        return cls(in_shift=in_shift, in_scale=in_scale)

    def transform(self, X):
        return (np.asarray(X, dtype=float) - self.in_shift) / self.in_scale


def fit_standardizer(kind, X):
    return Standardizer.fit(X) if kind in STANDARDIZED_KINDS else None


def softmax(logits):
    logits = np.asarray(logits, dtype=float)
    shifted = logits - np.max(logits, axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class TrainedModel:
    spec: ModelSpec
    class_names: Tuple[str, ...]
    estimator: object
    standardizer: Optional[Standardizer] = None

    @property
    def n_classes(self):
        return len(self.class_names)

    def _inputs(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self.standardizer.transform(X) if self.standardizer is not None else X

    def score(self, X):
        scores = self.estimator.predict_proba(self._inputs(X))
        assert scores.shape[1] == self.n_classes
        return scores

    def predict(self, X):
        # argmax returns the first maximum: ties go to the earlier class
        return np.argmax(self.score(X), axis=1)

    def predict_names(self, X):
        return [self.class_names[i] for i in self.predict(X)]
