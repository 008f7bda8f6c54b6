"""
Tree ensembles: SAMME AdaBoost, RUSBoost and the shared ensemble container.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from csfml.ensembles.cart import TreeConfig, fit_cart
from csfml.learners.base import softmax
from csfml.utils.errors import EnsembleError

ADABOOST = 'adaboost'
RUSBOOST = 'rusboost'
BAGGING = 'bagging'

# weight of a learner with zero training error
PERFECT_ALPHA = math.log(1e10)


@dataclass(frozen=True)
class TreeEnsemble:
    members: Tuple
    weights: np.ndarray
    method: str
    n_classes: int
    epsilons: Optional[np.ndarray] = None
    sample_indices: Optional[Tuple[np.ndarray, ...]] = None
    weight_history: Optional[Tuple[np.ndarray, ...]] = None

    @property
    def rounds(self):
        return len(self.members)

    def predict_proba(self, X):
        return ensemble_score(self, X)

    def predict(self, X):
        return np.argmax(ensemble_score(self, X), axis=1)


def ensemble_score(ensemble, X):
    """Boosting: softmax of the alpha-weighted one-hot votes. Bagging: mean leaf distribution."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if ensemble.method == BAGGING:
        return np.mean([tree.predict_proba(X) for tree in ensemble.members], axis=0)
    votes = np.zeros((X.shape[0], ensemble.n_classes))
    rows = np.arange(X.shape[0])
    for tree, alpha in zip(ensemble.members, ensemble.weights):
        votes[rows, tree.predict(X)] += alpha
    return softmax(votes)


def samme_alpha(epsilon, n_classes):
    if epsilon <= 0:
        return PERFECT_ALPHA
    return math.log((1.0 - epsilon) / epsilon) + math.log(n_classes - 1)


def _boost(X, y, T, config, n_classes, method, rng=None, logger=None, keep_weights=False):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    n_classes = int(y.max()) + 1 if n_classes is None else n_classes
    if n_classes < 2:
        raise EnsembleError("boosting needs at least 2 classes")
    config = TreeConfig(max_depth=3) if config is None else config
    n = y.shape[0]
    w = np.full(n, 1.0 / n)
    chance = 1.0 - 1.0 / n_classes

    members, alphas, epsilons, subsets, history = [], [], [], [], []
    for t in range(T):
        if method == RUSBOOST:
            rows = undersample_rows(y, w, n_classes, rng)
            tree = fit_cart(X[rows], y[rows], w[rows] / w[rows].sum(), config, n_classes)
            subsets.append(rows)
        else:
            tree = fit_cart(X, y, w, config, n_classes)

        miss = tree.predict(X) != y
        epsilon = float(w[miss].sum())
        if epsilon >= chance:
            if t == 0:
                raise EnsembleError("base learner no better than chance on round 1 (error %.4f)" % epsilon)
            if subsets:
                subsets.pop()
            break

        alpha = samme_alpha(epsilon, n_classes)
        members.append(tree)
        alphas.append(alpha)
        epsilons.append(epsilon)
        if logger is not None:
            logger.log_kv('round', t)
            logger.log_kv('epsilon', epsilon)
            logger.log_kv('alpha', alpha)
        if epsilon <= 0:
            break

        w = w * np.exp(alpha * miss)
        w = w / w.sum()
        if keep_weights:
            history.append(w.copy())

    return TreeEnsemble(members=tuple(members), weights=np.array(alphas), method=method,
                        n_classes=n_classes, epsilons=np.array(epsilons),
                        sample_indices=tuple(subsets) if method == RUSBOOST else None,
                        weight_history=tuple(history) if keep_weights else None)


def adaboost_fit(X, y, T=30, config=None, n_classes=None, logger=None, keep_weights=False):
    """
    SAMME boosting of depth-limited CART trees.
    Stops early when a round's weighted error reaches 1 - 1/K (an error on the
    first round) or drops to zero (that tree is kept with weight ln(1e10)).
    """
    return _boost(X, y, T, config, n_classes, ADABOOST, logger=logger, keep_weights=keep_weights)


def undersample_rows(y, w, n_classes, rng):
    """Every class down to the minority count, drawn without replacement with probability ~ w."""
    members = [np.flatnonzero(y == c) for c in range(n_classes)]
    m = min(idx.size for idx in members)
    if m == 0:
        raise EnsembleError("cannot undersample: a class has no training rows")
    rows = []
    for idx in members:
        p = w[idx] / w[idx].sum()
        rows.append(rng.choice(idx, size=m, replace=False, p=p))
    return np.sort(np.concatenate(rows))


def rusboost_fit(X, y, T=30, config=None, seed=0, n_classes=None, logger=None, keep_weights=False):
    """
    AdaBoost whose trees are fit on a weight-proportional random undersample
    while the boosting weights live on the full training set.
    """
    rng = np.random.default_rng(seed)
    return _boost(X, y, T, config, n_classes, RUSBOOST, rng=rng, logger=logger, keep_weights=keep_weights)
