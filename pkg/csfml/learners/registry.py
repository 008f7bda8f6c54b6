"""
Single entry point for training any ModelKind.
"""

import numpy as np

from csfml.ensembles.bagging import bagging_fit
from csfml.ensembles.boosting import adaboost_fit, rusboost_fit
from csfml.ensembles.cart import TreeConfig
from csfml.learners.base import ModelKind, ModelSpec, TrainedModel
from csfml.learners.knn import train_knn
from csfml.learners.logistic import train_logistic
from csfml.learners.naive_bayes import train_gaussian_nb, train_kernel_nb
from csfml.learners.svm import train_svm


def tree_config(spec):
    return TreeConfig(max_depth=spec.max_depth, min_leaf=spec.hyperparameters.min_leaf)


def train_tree_ensemble(X, y, class_names, spec, logger=None):
    hp = spec.hyperparameters
    n_classes = len(class_names)
    X = np.asarray(X, dtype=float)
    if spec.kind == ModelKind.BOOSTED:
        estimator = adaboost_fit(X, y, hp.rounds, tree_config(spec), n_classes, logger=logger)
    elif spec.kind == ModelKind.RUSBOOST:
        estimator = rusboost_fit(X, y, hp.rounds, tree_config(spec), seed=spec.seed, n_classes=n_classes,
                                 logger=logger)
    elif spec.kind == ModelKind.BAGGED:
        estimator = bagging_fit(X, y, hp.rounds, tree_config(spec), seed=spec.seed, n_classes=n_classes,
                                logger=logger)
    else:
        raise ValueError("%s is not a tree ensemble" % spec.kind.value)
    return TrainedModel(spec=spec, class_names=tuple(class_names), estimator=estimator)


def train_model(spec, X, y, class_names, logger=None):
    """
    :param spec:            ModelSpec (or a bare ModelKind / CLI token for defaults)
    :param X:               raw training features (n, d); standardization happens here
    :param y:               class indices (n,)
    :param class_names:     ordered class names
    :param logger:          optional DataLog for per-round ensemble statistics
    """
    if not isinstance(spec, ModelSpec):
        spec = ModelSpec(spec)
    kind = spec.kind
    if kind == ModelKind.LOGISTIC:
        return train_logistic(X, y, class_names, spec)
    if kind == ModelKind.NB_GAUSS:
        return train_gaussian_nb(X, y, class_names, spec)
    if kind == ModelKind.NB_KERNEL:
        return train_kernel_nb(X, y, class_names, spec)
    if kind == ModelKind.SVM_LINEAR:
        return train_svm(X, y, class_names, 'linear', spec)
    if kind == ModelKind.SVM_QUADRATIC:
        return train_svm(X, y, class_names, 'quadratic', spec)
    if kind in (ModelKind.KNN_COARSE, ModelKind.KNN_COSINE):
        return train_knn(X, y, class_names, kind, spec)
    return train_tree_ensemble(X, y, class_names, spec, logger=logger)
