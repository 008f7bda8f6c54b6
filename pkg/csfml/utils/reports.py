"""
Report writers. CSV files mark undefined values as NA and an infinite F
statistic as inf; JSON files use null. Rates are stored as fractions and only
shown as percentages in the printed tables.
"""

import json
import math
import os

import numpy as np
import pandas as pd
from tabulate import tabulate

SCHEMA_VERSION = 1
NA = 'NA'
FLOAT_FORMAT = '%.10g'


def _float(value):
    return np.nan if value is None else float(value)


def write_frame(frame, path):
    frame.to_csv(path, index=False, na_rep=NA, float_format=FLOAT_FORMAT, lineterminator='\n')
    return path


def write_json(payload, path):
    with open(path, 'w') as f:
        json.dump(payload, f, indent=4, allow_nan=False)
        f.write('\n')
    return path


def json_number(value):
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def write_run_config(config, out_dir):
    return write_json(dict(schema_version=SCHEMA_VERSION, config=config.to_dict()),
                      os.path.join(out_dir, 'run_config.json'))


def percent(value):
    return NA if value is None else '%.1f' % (100.0 * value)


# ===============================================================================
# Cohort / statistics tables
# ===============================================================================

def write_counts_csv(counts, path):
    return write_frame(pd.DataFrame(list(counts.items()), columns=['class', 'count']), path)


def write_summary_csv(summaries, path, variables):
    rows = []
    for s in summaries:
        row = dict(group=s.group.value, n=s.n)
        for variable in variables:
            row[variable + '_mean'] = _float(s.mean[variable])
            row[variable + '_sem'] = _float(s.sem[variable])
        rows.append(row)
    columns = ['group', 'n'] + [v + suffix for v in variables for suffix in ('_mean', '_sem')]
    return write_frame(pd.DataFrame(rows, columns=columns), path)


def write_correlations_csv(rows, path, alpha=0.05):
    frame = pd.DataFrame([dict(variable=r.variable, group=r.group, r=_float(r.r), p=_float(r.p), n=r.n,
                               significant=NA if r.p is None else str(r.p < alpha).lower())
                          for r in rows], columns=['variable', 'group', 'r', 'p', 'n', 'significant'])
    return write_frame(frame, path)


def write_anova_csv(rows, path, alpha=0.05):
    frame = pd.DataFrame([dict(variable=r.variable, groups=';'.join(r.groups), f=_float(r.f_stat),
                               df_between=_float(r.df_between), df_within=_float(r.df_within), p=_float(r.p),
                               significant=NA if r.p is None else str(r.p < alpha).lower())
                          for r in rows],
                         columns=['variable', 'groups', 'f', 'df_between', 'df_within', 'p', 'significant'])
    return write_frame(frame, path)


# ===============================================================================
# Evaluation reports
# ===============================================================================

def metrics_payload(report, config, model, class_names):
    return dict(
        schema_version=SCHEMA_VERSION,
        task=config.task,
        scheme=config.scheme,
        model=model,
        folds=config.folds,
        seed=config.seed,
        balance=config.balance,
        accuracy=json_number(report.accuracy),
        per_class=[{k: json_number(v) if k != 'name' else v for k, v in c.to_dict().items()}
                   for c in report.per_class],
        auc=json_number(report.auc),
        auc_per_class={c.name: json_number(c.auc) for c in report.per_class} if len(class_names) > 2 else None,
        config=config.provenance(),
    )


def write_metrics_json(report, config, model, class_names, path):
    return write_json(metrics_payload(report, config, model, class_names), path)


def write_confusion_csv(cm, path):
    frame = pd.DataFrame(cm.counts, columns=list(cm.class_names))
    frame.insert(0, 'true\\predicted', list(cm.class_names))
    return write_frame(frame, path)


def write_roc_csv(curve, path):
    frame = pd.DataFrame(dict(threshold=curve.thresholds, fpr=curve.fpr, tpr=curve.tpr),
                         columns=['threshold', 'fpr', 'tpr'])
    return write_frame(frame, path)


def write_roc_csvs(curves, out_dir):
    """One roc.csv for a single curve, roc_<class>.csv per class otherwise."""
    if len(curves) == 1:
        (curve,) = curves.values()
        return [write_roc_csv(curve, os.path.join(out_dir, 'roc.csv'))]
    return [write_roc_csv(curve, os.path.join(out_dir, 'roc_%s.csv' % name.lower()))
            for name, curve in curves.items()]


def write_compare_csv(results, class_names, path):
    """:param results: list of (model token, MetricsReport)"""
    columns = ['model', 'accuracy'] + ['tpr_%s' % name.lower() for name in class_names]
    rows = []
    for model, report in results:
        row = dict(model=model, accuracy=report.accuracy)
        for c in report.per_class:
            row['tpr_%s' % c.name.lower()] = _float(c.tpr)
        rows.append(row)
    return write_frame(pd.DataFrame(rows, columns=columns), path)


def write_compare_detail_csv(results, path):
    rows = [dict(model=model, **{'class': c.name}, tpr=_float(c.tpr), fnr=_float(c.fnr), ppv=_float(c.ppv),
                 fdr=_float(c.fdr), auc=_float(c.auc))
            for model, report in results for c in report.per_class]
    return write_frame(pd.DataFrame(rows, columns=['model', 'class', 'tpr', 'fnr', 'ppv', 'fdr', 'auc']), path)


# ===============================================================================
# Console tables
# ===============================================================================

def metrics_table(report):
    rows = [[c.name, percent(c.tpr), percent(c.fnr), percent(c.ppv), percent(c.fdr)] for c in report.per_class]
    table = tabulate(rows, headers=['class', 'TPR %', 'FNR %', 'PPV %', 'FDR %'], tablefmt='simple')
    auc_text = NA if report.auc is None else '%.3f' % report.auc
    return "accuracy %s %%  |  AUC %s\n%s" % (percent(report.accuracy), auc_text, table)


def compare_table(results, class_names, titles=None):
    titles = {} if titles is None else titles
    rows = [[titles.get(model, model), percent(report.accuracy)] + [percent(c.tpr) for c in report.per_class]
            for model, report in results]
    headers = ['model', 'accuracy %'] + ['TPR %s %%' % name for name in class_names]
    return tabulate(rows, headers=headers, tablefmt='simple')


def counts_table(counts):
    return tabulate(list(counts.items()), headers=['class', 'count'], tablefmt='simple')
