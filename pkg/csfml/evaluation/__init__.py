from csfml.evaluation.folds import FoldPlan, kfold
from csfml.evaluation.metrics import (ClassMetrics, ConfusionMatrix, MetricsReport, RocCurve, auc, metrics,
                                      one_vs_rest_rocs, roc)
from csfml.evaluation.cross_validation import CrossValidationResult, cross_validate
