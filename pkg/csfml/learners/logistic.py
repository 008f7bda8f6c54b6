"""
L2 penalized logistic regression fit by iteratively reweighted least squares.
Binary models minimize mean negative log-likelihood + lam/2 |w|^2 (intercept
included in w); multiclass problems use one-vs-rest.
"""

import numpy as np
import scipy.special as special

from csfml.learners.base import ModelKind, ModelSpec, TrainedModel, fit_standardizer


def add_intercept(X):
    X = np.asarray(X, dtype=float)
    return np.hstack([np.ones((X.shape[0], 1)), X])


def objective(w, Xa, y, lam):
    z = Xa.dot(w)
    return float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * lam * w.dot(w))


def gradient(w, Xa, y, lam):
    p = special.expit(Xa.dot(w))
    return Xa.T.dot(p - y) / Xa.shape[0] + lam * w


def hessian(w, Xa, lam):
    p = special.expit(Xa.dot(w))
    s = p * (1.0 - p)
    return (Xa.T * s).dot(Xa) / Xa.shape[0] + lam * np.identity(Xa.shape[1])


def ridge_solve(A, b, reg_coeff=0.0):
    """Solve A x = b, adding a growing ridge while the system stays singular."""
    eye = np.identity(A.shape[0])
    for _ in range(10):
        try:
            x = np.linalg.solve(A + reg_coeff * eye, b)
            if np.all(np.isfinite(x)):
                return x
        except np.linalg.LinAlgError:
            pass
        reg_coeff = 1e-10 if reg_coeff == 0 else reg_coeff * 10
    return np.linalg.lstsq(A + reg_coeff * eye, b, rcond=None)[0]


class BinaryLogisticRegression:
    def __init__(self, lam=1e-4, max_iter=100, tol=1e-8):
        self.lam = lam
        self.max_iter = max_iter
        self.tol = tol
        self.coef_ = None
        self.objective_trace = []
        self.n_iter = 0

    def fit(self, Xa, y):
        """
        :param Xa:  design matrix with intercept column (n, d)
        :param y:   0/1 targets (n,)
        """
        y = np.asarray(y, dtype=float)
        w = np.zeros(Xa.shape[1])
        obj = objective(w, Xa, y, self.lam)
        self.objective_trace = [obj]

        for it in range(self.max_iter):
            step = ridge_solve(hessian(w, Xa, self.lam), gradient(w, Xa, y, self.lam))
            # step halving: the objective never increases
            t = 1.0
            w_new, obj_new = w, obj
            for _ in range(60):
                candidate = w - t * step
                obj_candidate = objective(candidate, Xa, y, self.lam)
                if obj_candidate <= obj:
                    w_new, obj_new = candidate, obj_candidate
                    break
                t *= 0.5
            delta = np.max(np.abs(w_new - w))
            w, obj = w_new, obj_new
            self.objective_trace.append(obj)
            self.n_iter = it + 1
            if delta < self.tol:
                break

        self.coef_ = w
        return self

    def predict(self, Xa):
        return special.expit(Xa.dot(self.coef_))


class LogisticRegression:
    def __init__(self, n_classes, lam=1e-4, max_iter=100, tol=1e-8):
        self.n_classes = n_classes
        self.lam = lam
        self.max_iter = max_iter
        self.tol = tol
        self.models = []

    def _binary(self):
        return BinaryLogisticRegression(lam=self.lam, max_iter=self.max_iter, tol=self.tol)

    def fit(self, X, y):
        Xa = add_intercept(X)
        y = np.asarray(y, dtype=int)
        if self.n_classes == 2:
            self.models = [self._binary().fit(Xa, y == 1)]
        else:
            self.models = [self._binary().fit(Xa, y == c) for c in range(self.n_classes)]
        return self

    def predict_proba(self, X):
        Xa = add_intercept(X)
        if self.n_classes == 2:
            p = self.models[0].predict(Xa)
            return np.column_stack([1.0 - p, p])
        P = np.column_stack([m.predict(Xa) for m in self.models])
        P = np.maximum(P, 1e-300)
        return P / P.sum(axis=1, keepdims=True)


def train_logistic(X, y, class_names, spec=None):
    spec = ModelSpec(ModelKind.LOGISTIC) if spec is None else spec
    hp = spec.hyperparameters
    standardizer = fit_standardizer(ModelKind.LOGISTIC, X)
    estimator = LogisticRegression(len(class_names), lam=hp.lam, max_iter=hp.max_iter, tol=hp.tol)
    estimator.fit(standardizer.transform(X), y)
    return TrainedModel(spec=spec, class_names=tuple(class_names), estimator=estimator,
                        standardizer=standardizer)
