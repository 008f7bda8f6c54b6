"""
Soft-margin support vector machines trained by sequential minimal optimization.
The dual  min 1/2 a'Qa - e'a,  0 <= a <= C,  y'a = 0  (Q = yy' * K) is solved with
the maximal violating pair / second order working set selection. Multiclass
problems vote one-vs-one.
"""

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.special as special

from csfml.learners.base import ModelKind, ModelSpec, TrainedModel, fit_standardizer
from csfml.utils.errors import ConvergenceError

TAU = 1e-12


def linear_kernel(U, V):
    return np.asarray(U, dtype=float).dot(np.asarray(V, dtype=float).T)


def quadratic_kernel(U, V):
    return (1.0 + linear_kernel(U, V)) ** 2


KERNELS = {
    'linear': linear_kernel,
    'quadratic': quadratic_kernel,
}


@dataclass(frozen=True)
class SMOResult:
    alphas: np.ndarray
    rho: float
    n_iter: int
    violation: float


def _violating_pair(y, G, alpha, C, K_diag, K):
    """Working set (i, j) and the current KKT gap m(a) - M(a); i or j is None at optimum."""
    yG = -y * G
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
    if not up.any() or not low.any():
        return None, None, -np.inf
    up_idx = np.flatnonzero(up)
    i = up_idx[np.argmax(yG[up_idx])]
    g_max = yG[i]
    low_idx = np.flatnonzero(low)
    gap = g_max - np.min(yG[low_idx])

    b = g_max - yG[low_idx]
    candidates = low_idx[b > 0]
    if candidates.size == 0:
        return i, None, gap
    b = g_max - yG[candidates]
    a = K_diag[i] + K_diag[candidates] - 2.0 * K[i, candidates]
    gain = -(b ** 2) / np.maximum(a, TAU)
    j = candidates[np.argmin(gain)]
    return i, j, gap


def _update_pair(i, j, y, G, alpha, C, K):
    a_i, a_j = alpha[i], alpha[j]
    if y[i] != y[j]:
        quad = max(K[i, i] + K[j, j] - 2.0 * K[i, j], TAU)
        delta = (-G[i] - G[j]) / quad
        diff = a_i - a_j
        a_i += delta
        a_j += delta
        if diff > 0:
            if a_j < 0:
                a_j, a_i = 0.0, diff
        else:
            if a_i < 0:
                a_i, a_j = 0.0, -diff
        if diff > 0:
            if a_i > C:
                a_i, a_j = C, C - diff
        else:
            if a_j > C:
                a_j, a_i = C, C + diff
    else:
        quad = max(K[i, i] + K[j, j] - 2.0 * K[i, j], TAU)
        delta = (G[i] - G[j]) / quad
        total = a_i + a_j
        a_i -= delta
        a_j += delta
        if total > C:
            if a_i > C:
                a_i, a_j = C, total - C
        else:
            if a_j < 0:
                a_j, a_i = 0.0, total
        if total > C:
            if a_j > C:
                a_j, a_i = C, total - C
        else:
            if a_i < 0:
                a_i, a_j = 0.0, total
    return a_i, a_j


def _offset(y, G, alpha, C):
    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(np.mean(yG[free]))
    at_upper = alpha >= C
    ub_mask = (at_upper & (y < 0)) | (~at_upper & (y > 0))
    lb_mask = ~ub_mask
    ub = np.min(yG[ub_mask]) if ub_mask.any() else np.inf
    lb = np.max(yG[lb_mask]) if lb_mask.any() else -np.inf
    if np.isfinite(ub) and np.isfinite(lb):
        return float(0.5 * (ub + lb))
    return float(ub if np.isfinite(ub) else lb)


def smo_solve(K, y, C=1.0, tol=1e-6, max_iter=200000):
    """
    :param K:           kernel matrix (n, n)
    :param y:           labels in {-1, +1} (n,)
    :return:            SMOResult; decision f(x) = sum_t alpha_t y_t K(x_t, x) - rho
    """
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.size
    Q = np.outer(y, y) * K
    K_diag = np.diag(K).copy()
    alpha = np.zeros(n)
    G = -np.ones(n)

    gap = np.inf
    for it in range(max_iter + 1):
        i, j, gap = _violating_pair(y, G, alpha, C, K_diag, K)
        if gap < tol or i is None or j is None:
            return SMOResult(alphas=alpha, rho=_offset(y, G, alpha, C), n_iter=it, violation=float(max(gap, 0.0)))
        if it == max_iter:
            break
        old_i, old_j = alpha[i], alpha[j]
        alpha[i], alpha[j] = _update_pair(i, j, y, G, alpha, C, K)
        G += Q[:, i] * (alpha[i] - old_i) + Q[:, j] * (alpha[j] - old_j)

    raise ConvergenceError("SMO did not converge in %i iterations (KKT violation %.3e)" % (max_iter, gap),
                           worst_violation=float(gap))


class BinarySVM:
    def __init__(self, kernel='linear', C=1.0, tol=1e-6, max_iter=200000):
        self.kernel = kernel
        self.C = C
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y_signed):
        X = np.asarray(X, dtype=float)
        kernel = KERNELS[self.kernel]
        self.result = smo_solve(kernel(X, X), y_signed, C=self.C, tol=self.tol, max_iter=self.max_iter)
        support = self.result.alphas > 0
        self.support_vectors = X[support]
        self.dual_coef = self.result.alphas[support] * np.asarray(y_signed, dtype=float)[support]
        self.rho = self.result.rho
        return self

    def decision_function(self, X):
        X = np.asarray(X, dtype=float)
        if self.support_vectors.shape[0] == 0:
            return np.full(X.shape[0], -self.rho)
        return KERNELS[self.kernel](X, self.support_vectors).dot(self.dual_coef) - self.rho


class SVMClassifier:
    """Binary: scores [sigmoid(-f), sigmoid(f)] with class 1 positive. Multiclass: one-vs-one vote fractions."""

    def __init__(self, n_classes, kernel='linear', C=1.0, tol=1e-6, max_iter=200000):
        self.n_classes = n_classes
        self.kernel = kernel
        self.C = C
        self.tol = tol
        self.max_iter = max_iter
        self.machines = {}

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        for a, b in itertools.combinations(range(self.n_classes), 2):
            rows = np.flatnonzero((y == a) | (y == b))
            y_signed = np.where(y[rows] == b, 1.0, -1.0)
            machine = BinarySVM(self.kernel, C=self.C, tol=self.tol, max_iter=self.max_iter)
            self.machines[(a, b)] = machine.fit(X[rows], y_signed)
        return self

    def predict_proba(self, X):
        X = np.asarray(X, dtype=float)
        if self.n_classes == 2:
            f = self.machines[(0, 1)].decision_function(X)
            return np.column_stack([special.expit(-f), special.expit(f)])
        votes = np.zeros((X.shape[0], self.n_classes))
        for (a, b), machine in self.machines.items():
            positive = machine.decision_function(X) > 0
            votes[:, b] += positive
            votes[:, a] += ~positive
        return votes / len(self.machines)


def train_svm(X, y, class_names, kernel='linear', spec=None):
    if spec is None:
        spec = ModelSpec(ModelKind.SVM_QUADRATIC if kernel == 'quadratic' else ModelKind.SVM_LINEAR)
    hp = spec.hyperparameters
    standardizer = fit_standardizer(spec.kind, X)
    estimator = SVMClassifier(len(class_names), kernel=kernel, C=hp.C, tol=hp.svm_tol, max_iter=hp.svm_max_iter)
    estimator.fit(standardizer.transform(X), y)
    return TrainedModel(spec=spec, class_names=tuple(class_names), estimator=estimator,
                        standardizer=standardizer)
