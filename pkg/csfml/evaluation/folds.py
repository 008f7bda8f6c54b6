from dataclasses import dataclass

import numpy as np

from csfml.utils.errors import FoldError


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray     # fold index of every row
    seed: int
    stratified: bool

    def test_indices(self, fold):
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold):
        return np.flatnonzero(self.assignments != fold)

    def folds(self):
        for fold in range(self.k):
            yield self.train_indices(fold), self.test_indices(fold)

    def fold_sizes(self):
        return np.bincount(self.assignments, minlength=self.k)


def kfold(labels, k=5, seed=0, stratified=True):
    """
    Seeded shuffle, then round-robin fold assignment. Stratified plans deal
    each class in turn, continuing the round-robin where the previous class
    stopped, so per-class fold counts differ by at most one.
    """
    labels = np.asarray(labels)
    n = labels.shape[0]
    if k < 2:
        raise FoldError("k must be >= 2, got %i" % k)
    if n < k:
        raise FoldError("cannot split %i rows into %i folds" % (n, k))

    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    assignments = np.empty(n, dtype=int)
    if stratified:
        classes, counts = np.unique(labels, return_counts=True)
        small = classes[counts < k]
        if small.size:
            raise FoldError("class %s has fewer than %i members" % (small[0], k))
        offset = 0
        for c in classes:
            rows = order[labels[order] == c]
            assignments[rows] = (offset + np.arange(rows.size)) % k
            offset = (offset + rows.size) % k
    else:
        assignments[order] = np.arange(n) % k
    return FoldPlan(k=k, assignments=assignments, seed=seed, stratified=stratified)
