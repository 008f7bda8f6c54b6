"""
k-fold cross-validation of one model specification.
Every fold trains on its own split (standardization included) with a seed
derived from (spec.seed, fold), so results are identical whether folds run
serially or in worker processes.
"""

from dataclasses import dataclass

import numpy as np

from csfml.evaluation.metrics import ConfusionMatrix
from csfml.learners.registry import train_model
from csfml.utils.errors import CrossValidationError
from csfml.utils.parallel import run_jobs, unit_seed


@dataclass(frozen=True)
class CrossValidationResult:
    confusion: ConfusionMatrix
    scores: np.ndarray          # held-out scores, one row per dataset row
    predictions: np.ndarray
    labels: np.ndarray


def fold_seed(seed, fold):
    return unit_seed(seed, fold)


def _fit_fold(spec, X_train, y_train, X_test, class_names, fold):
    # errors travel back as values so the caller can name the fold
    try:
        model = train_model(spec, X_train, y_train, class_names)
        return dict(fold=fold, scores=model.score(X_test), error=None)
    except Exception as exc:
        return dict(fold=fold, scores=None, error=exc)


def cross_validate(spec, data, plan, num_cpu=1, logger=None):
    """
    :param spec:        ModelSpec
    :param data:        LabeledDataset
    :param plan:        FoldPlan over data's rows
    :param num_cpu:     workers for running folds in parallel
    :param logger:      optional DataLog receiving per-fold statistics
    :return:            CrossValidationResult with pooled confusion counts
    """
    X, y = data.features, data.labels
    assert plan.assignments.shape[0] == data.n_samples
    jobs = []
    for fold, (train, test) in enumerate(plan.folds()):
        jobs.append(dict(spec=spec.with_seed(fold_seed(spec.seed, fold)),
                         X_train=X[train], y_train=y[train], X_test=X[test],
                         class_names=data.class_names, fold=fold))
    results = run_jobs(_fit_fold, jobs, num_cpu=num_cpu)

    scores = np.full((data.n_samples, data.n_classes), np.nan)
    for result, (train, test) in zip(results, plan.folds()):
        if result['error'] is not None:
            raise CrossValidationError(result['fold'], result['error']) from result['error']
        scores[test] = result['scores']
        if logger is not None:
            fold_predictions = np.argmax(result['scores'], axis=1)
            logger.log_kv('fold', result['fold'])
            logger.log_kv('n_train', int(train.size))
            logger.log_kv('n_test', int(test.size))
            logger.log_kv('fold_accuracy', float(np.mean(fold_predictions == y[test])) if test.size else None)
    assert np.all(np.isfinite(scores))

    predictions = np.argmax(scores, axis=1)
    confusion = ConfusionMatrix.from_predictions(y, predictions, data.class_names)
    return CrossValidationResult(confusion=confusion, scores=scores, predictions=predictions,
                                 labels=np.asarray(y).copy())
