"""
Gaussian and kernel density naive Bayes.
Both score classes by log prior + sum of per-feature log densities and
normalize with a softmax.
"""

import math

import numpy as np
from scipy.special import logsumexp

from csfml.learners.base import ModelKind, ModelSpec, TrainedModel, fit_standardizer

VAR_FLOOR_FRACTION = 1e-9
BANDWIDTH_FLOOR = 1e-6
LOG_DENSITY_FLOOR = -745.0
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _log_priors(y, n_classes):
    counts = np.bincount(y, minlength=n_classes).astype(float)
    with np.errstate(divide='ignore'):
        return np.log(counts / counts.sum()), counts


def _posterior(jll):
    return np.exp(jll - logsumexp(jll, axis=1, keepdims=True))


class GaussianNB:
    def __init__(self, n_classes):
        self.n_classes = n_classes

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self.log_prior, counts = _log_priors(y, self.n_classes)
        floor = VAR_FLOOR_FRACTION * np.var(X, axis=0)
        floor = np.where(floor > 0, floor, VAR_FLOOR_FRACTION)
        d = X.shape[1]
        self.theta = np.zeros((self.n_classes, d))
        self.var = np.ones((self.n_classes, d))
        for c in range(self.n_classes):
            if counts[c] == 0:
                continue
            Xc = X[y == c]
            self.theta[c] = Xc.mean(axis=0)
            self.var[c] = np.maximum(Xc.var(axis=0), floor)
        return self

    def joint_log_likelihood(self, X):
        X = np.asarray(X, dtype=float)
        jll = np.zeros((X.shape[0], self.n_classes))
        for c in range(self.n_classes):
            quad = ((X - self.theta[c]) ** 2 / self.var[c]).sum(axis=1)
            jll[:, c] = self.log_prior[c] - 0.5 * np.log(2.0 * np.pi * self.var[c]).sum() - 0.5 * quad
        return jll

    def predict_proba(self, X):
        return _posterior(self.joint_log_likelihood(X))


def silverman_bandwidth(values):
    """0.9 min(sd, IQR/1.34) n^(-1/5); 0.0 when the spread is undefined or zero."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 2:
        return 0.0
    sd = values.std(ddof=1)
    q75, q25 = np.percentile(values, [75, 25])
    iqr = q75 - q25
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    return float(0.9 * spread * n ** (-0.2))


class KernelNB:
    """
    Per class, per feature Gaussian kernel density estimates. A class whose
    own bandwidth is undefined (single point, constant feature) borrows the
    bandwidth computed over the whole training set for that feature.
    """

    def __init__(self, n_classes):
        self.n_classes = n_classes

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self.log_prior, counts = _log_priors(y, self.n_classes)
        d = X.shape[1]
        pooled = np.array([silverman_bandwidth(X[:, f]) for f in range(d)])
        self.points = [X[y == c] for c in range(self.n_classes)]
        self.bandwidth = np.full((self.n_classes, d), BANDWIDTH_FLOOR)
        for c in range(self.n_classes):
            for f in range(d):
                h = silverman_bandwidth(self.points[c][:, f])
                h = h if h > 0 else pooled[f]
                self.bandwidth[c, f] = max(h, BANDWIDTH_FLOOR)
        return self

    def log_density(self, X, c, f):
        points = self.points[c][:, f]
        if points.size == 0:
            return np.full(X.shape[0], -np.inf)
        h = self.bandwidth[c, f]
        u = (X[:, f][:, None] - points[None, :]) / h
        log_d = logsumexp(-0.5 * u ** 2, axis=1) - math.log(points.size * h) - LOG_SQRT_2PI
        return np.maximum(log_d, LOG_DENSITY_FLOOR)

    def joint_log_likelihood(self, X):
        X = np.asarray(X, dtype=float)
        jll = np.zeros((X.shape[0], self.n_classes))
        for c in range(self.n_classes):
            jll[:, c] = self.log_prior[c]
            if self.points[c].shape[0] == 0:
                continue
            for f in range(X.shape[1]):
                jll[:, c] += self.log_density(X, c, f)
        return jll

    def predict_proba(self, X):
        return _posterior(self.joint_log_likelihood(X))


def train_gaussian_nb(X, y, class_names, spec=None):
    spec = ModelSpec(ModelKind.NB_GAUSS) if spec is None else spec
    standardizer = fit_standardizer(ModelKind.NB_GAUSS, X)
    estimator = GaussianNB(len(class_names)).fit(standardizer.transform(X), y)
    return TrainedModel(spec=spec, class_names=tuple(class_names), estimator=estimator,
                        standardizer=standardizer)


def train_kernel_nb(X, y, class_names, spec=None):
    spec = ModelSpec(ModelKind.NB_KERNEL) if spec is None else spec
    standardizer = fit_standardizer(ModelKind.NB_KERNEL, X)
    estimator = KernelNB(len(class_names)).fit(standardizer.transform(X), y)
    return TrainedModel(spec=spec, class_names=tuple(class_names), estimator=estimator,
                        standardizer=standardizer)
