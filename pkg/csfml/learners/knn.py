"""
k-nearest neighbours with Euclidean (coarse) or cosine distance.
Scores are vote fractions among the k nearest training rows; equal distances
keep training order so the smaller index wins.
"""

import numpy as np

from csfml.learners.base import Hyperparameters, ModelKind, ModelSpec, TrainedModel, fit_standardizer
from csfml.utils.errors import QueryError

METRICS = {
    ModelKind.KNN_COARSE: 'euclidean',
    ModelKind.KNN_COSINE: 'cosine',
}


def euclidean_distances(train, query):
    diff = query[:, None, :] - train[None, :, :]
    return np.sqrt(np.sum(diff ** 2, axis=-1))


def cosine_distances(train, query):
    query_norm = np.linalg.norm(query, axis=1)
    if np.any(query_norm == 0):
        raise QueryError("cosine distance is undefined for a zero-norm query")
    train_norm = np.linalg.norm(train, axis=1)
    train_norm = np.where(train_norm > 0, train_norm, 1.0)
    sim = query.dot(train.T) / np.outer(query_norm, train_norm)
    return 1.0 - np.clip(sim, -1.0, 1.0)


class KNNClassifier:
    def __init__(self, n_classes, k=10, metric='euclidean'):
        assert metric in ('euclidean', 'cosine')
        self.n_classes = n_classes
        self.k = k
        self.metric = metric

    def fit(self, X, y):
        self.X = np.asarray(X, dtype=float)
        self.y = np.asarray(y, dtype=int)
        return self

    def kneighbors(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.metric == 'cosine':
            dist = cosine_distances(self.X, X)
        else:
            dist = euclidean_distances(self.X, X)
        k = min(self.k, self.X.shape[0])
        return np.argsort(dist, axis=1, kind='stable')[:, :k]

    def predict_proba(self, X):
        neighbours = self.kneighbors(X)
        votes = np.zeros((neighbours.shape[0], self.n_classes))
        for c in range(self.n_classes):
            votes[:, c] = np.sum(self.y[neighbours] == c, axis=1)
        return votes / neighbours.shape[1]


def train_knn(X, y, class_names, kind=ModelKind.KNN_COARSE, spec=None):
    spec = ModelSpec(kind) if spec is None else spec
    standardizer = fit_standardizer(spec.kind, X)
    inputs = standardizer.transform(X) if standardizer is not None else np.asarray(X, dtype=float)
    estimator = KNNClassifier(len(class_names), k=spec.k, metric=METRICS[spec.kind]).fit(inputs, y)
    return TrainedModel(spec=spec, class_names=tuple(class_names), estimator=estimator,
                        standardizer=standardizer)


def knn_predict(train, query, kind, k=None):
    """
    Vote-fraction scores of `query` rows against a LabeledDataset.

    :param train:   LabeledDataset holding the neighbours
    :param query:   feature rows (m, 4)
    :param kind:    ModelKind.KNN_COARSE or ModelKind.KNN_COSINE (or its token)
    :param k:       neighbours, defaults per kind
    """
    kind = ModelKind.from_token(kind) if not isinstance(kind, ModelKind) else kind
    if kind not in METRICS:
        raise QueryError("'%s' is not a nearest-neighbour model" % kind.value)
    spec = ModelSpec(kind, Hyperparameters(k=k))
    model = train_knn(train.features, train.labels, train.class_names, kind=kind, spec=spec)
    return model.score(query)
