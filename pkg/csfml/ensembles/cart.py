"""
Weighted CART classification trees (Gini impurity).
A node sends rows with x[feature] < threshold to the left child. Nodes are
stored in parallel arrays with the root at 0; leaves have feature == -1.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

LEAF = -1


@dataclass(frozen=True)
class TreeConfig:
    max_depth: Optional[int] = None     # None: unlimited
    min_leaf: int = 1

    def __post_init__(self):
        assert self.max_depth is None or self.max_depth >= 0
        assert self.min_leaf >= 1


@dataclass(frozen=True)
class DecisionTree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray       # (n_nodes, n_classes) weighted class distribution
    node_depth: np.ndarray
    n_classes: int

    @property
    def n_nodes(self):
        return self.feature.shape[0]

    @property
    def depth(self):
        return int(self.node_depth.max())

    @property
    def is_leaf(self):
        return self.feature == LEAF

    def apply(self, X):
        """Leaf index reached by every row."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        node = np.zeros(X.shape[0], dtype=int)
        active = self.feature[node] != LEAF
        while active.any():
            rows = np.flatnonzero(active)
            current = node[rows]
            go_left = X[rows, self.feature[current]] < self.threshold[current]
            node[rows] = np.where(go_left, self.left[current], self.right[current])
            active = self.feature[node] != LEAF
        return node

    def predict_proba(self, X):
        return self.value[self.apply(X)]

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1)


def gini_impurity(class_weights):
    """Weighted impurity W - sum_c w_c^2 / W of each row of class weight sums (0 for empty rows)."""
    class_weights = np.atleast_2d(class_weights)
    total = class_weights.sum(axis=1)
    squares = (class_weights ** 2).sum(axis=1)
    ratio = np.divide(squares, total, out=np.zeros_like(total), where=total > 0)
    return total - ratio


def best_split(X, onehot_weights, min_leaf):
    """
    Lowest-impurity split of the rows given by X / onehot_weights.
    Ties go to the lower feature index, then the lower threshold.

    :return:    (feature, threshold, impurity) or None if no split is valid
    """
    m, d = X.shape
    total = onehot_weights.sum(axis=0)
    positions = np.arange(1, m)
    best = None
    for f in range(d):
        order = np.argsort(X[:, f], kind='stable')
        xs = X[order, f]
        left = np.cumsum(onehot_weights[order], axis=0)[:-1]
        valid = (xs[1:] > xs[:-1]) & (positions >= min_leaf) & (m - positions >= min_leaf)
        if not valid.any():
            continue
        impurity = gini_impurity(left) + gini_impurity(total - left)
        impurity = np.where(valid, impurity, np.inf)
        p = int(np.argmin(impurity))
        if best is None or impurity[p] < best[2]:
            threshold = 0.5 * (xs[p] + xs[p + 1])
            if threshold <= xs[p]:
                threshold = xs[p + 1]
            best = (f, float(threshold), float(impurity[p]))
    return best


def fit_cart(X, y, sample_weight=None, config=None, n_classes=None):
    """
    :param X:               features (n, d)
    :param y:               class indices (n,)
    :param sample_weight:   nonnegative weights with positive sum (default: all ones)
    :param config:          TreeConfig
    :param n_classes:       number of classes (default: max(y) + 1)
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    config = TreeConfig() if config is None else config
    n_classes = int(y.max()) + 1 if n_classes is None else n_classes
    sample_weight = np.ones(y.shape[0]) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    assert np.all(sample_weight >= 0) and sample_weight.sum() > 0
    onehot = np.zeros((y.shape[0], n_classes))
    onehot[np.arange(y.shape[0]), y] = sample_weight

    feature, threshold, left, right, value, node_depth = [], [], [], [], [], []

    def add_node(rows, depth, parent_value):
        node_id = len(feature)
        class_weights = onehot[rows].sum(axis=0)
        total = class_weights.sum()
        distribution = class_weights / total if total > 0 else parent_value
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(distribution)
        node_depth.append(depth)
        return node_id, class_weights

    root, root_weights = add_node(np.arange(y.shape[0]), 0, np.full(n_classes, 1.0 / n_classes))
    stack = [(root, np.arange(y.shape[0]), 0, root_weights)]
    while stack:
        node_id, rows, depth, class_weights = stack.pop()
        if np.count_nonzero(class_weights) <= 1:
            continue
        if config.max_depth is not None and depth >= config.max_depth:
            continue
        split = best_split(X[rows], onehot[rows], config.min_leaf)
        if split is None:
            continue
        f, t, _ = split
        goes_left = X[rows, f] < t
        feature[node_id], threshold[node_id] = f, t
        left_id, left_weights = add_node(rows[goes_left], depth + 1, value[node_id])
        right_id, right_weights = add_node(rows[~goes_left], depth + 1, value[node_id])
        left[node_id], right[node_id] = left_id, right_id
        stack.append((right_id, rows[~goes_left], depth + 1, right_weights))
        stack.append((left_id, rows[goes_left], depth + 1, left_weights))

    return DecisionTree(feature=np.array(feature, dtype=int), threshold=np.array(threshold),
                        left=np.array(left, dtype=int), right=np.array(right, dtype=int),
                        value=np.array(value), node_depth=np.array(node_depth, dtype=int),
                        n_classes=n_classes)
