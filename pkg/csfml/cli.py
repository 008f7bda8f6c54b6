"""
csfml command line: staging, cohort statistics, cross-validated model
evaluation / comparison and synthetic cohort generation.

Exit codes: 0 success, 1 unexpected error, 2 usage error, 3 unknown model,
4 invalid configuration, 5 missing input file, 6 data error, 7 training or
evaluation failure.
"""

import argparse
import os
import sys
import time as timer

import numpy as np
from tabulate import tabulate

from csfml.config import resolve_config
from csfml.data.cohort import (Task, class_counts, make_task, merge_cohort, parse_assessment_csv,
                               parse_biomarker_csv, undersample, write_staged_csv)
from csfml.data.synth import PRESETS, generate_cohort, load_specs, write_cohort_csvs
from csfml.evaluation.cross_validation import cross_validate
from csfml.evaluation.folds import kfold
from csfml.evaluation.metrics import metrics, one_vs_rest_rocs, roc
from csfml.learners.base import MODEL_TITLES, ModelKind
from csfml.stats.descriptive import SUMMARY_VARIABLES, biomarker_anova, correlation_table, group_summary
from csfml.utils import make_result_plots, reports
from csfml.utils.errors import (CohortError, ConfigError, ConvergenceError, CrossValidationError, EnsembleError,
                                FoldError, MetricsError, ModelSpecError, QueryError, StatsError, SynthError,
                                UnknownModelError)
from csfml.utils.logger import DataLog
from csfml.utils.parallel import run_jobs, unit_seed

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_UNKNOWN_MODEL = 3
EXIT_CONFIG = 4
EXIT_MISSING_FILE = 5
EXIT_DATA = 6
EXIT_TRAINING = 7

# checked in order: subclasses before their parents
EXIT_CODES = (
    (UnknownModelError, EXIT_UNKNOWN_MODEL),
    (ConfigError, EXIT_CONFIG),
    (ModelSpecError, EXIT_CONFIG),
    (FileNotFoundError, EXIT_MISSING_FILE),
    (CohortError, EXIT_DATA),
    (SynthError, EXIT_DATA),
    (StatsError, EXIT_DATA),
    (FoldError, EXIT_DATA),
    (ConvergenceError, EXIT_TRAINING),
    (EnsembleError, EXIT_TRAINING),
    (QueryError, EXIT_TRAINING),
    (CrossValidationError, EXIT_TRAINING),
    (MetricsError, EXIT_TRAINING),
)

BINARY_MODELS = tuple(kind for kind in MODEL_TITLES if kind != ModelKind.RUSBOOST)
MULTI_MODELS = (ModelKind.RUSBOOST, ModelKind.BAGGED)
BALANCED_MULTI_MODELS = (ModelKind.BOOSTED, ModelKind.RUSBOOST, ModelKind.BAGGED)


def exit_code(exc):
    for exc_type, code in EXIT_CODES:
        if isinstance(exc, exc_type):
            return code
    return EXIT_UNEXPECTED


def compare_models(config):
    if config.task == Task.BINARY.value:
        return BINARY_MODELS
    return BALANCED_MULTI_MODELS if config.balance else MULTI_MODELS


def compare_specs(config):
    # each model trains with its own seed derived from the run seed and its position
    return [config.model_spec(kind).with_seed(unit_seed(config.seed, index))
            for index, kind in enumerate(compare_models(config))]


# ===============================================================================
# Argument parsing
# ===============================================================================

def _num_cpu(text):
    if text == 'max':
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer or 'max', got '%s'" % text)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', '-c', type=str, default=None, help='yaml file with run options')
    common.add_argument('--out', '-o', dest='out_dir', type=str, default=None,
                        help='output directory (default $CSFML_OUT_DIR or ./results)')
    common.add_argument('--seed', type=int, default=None, help='random seed (default 0)')

    cohort = argparse.ArgumentParser(add_help=False)
    cohort.add_argument('--biomarkers', type=str, default=None, help='csv: id,age,csf_abeta42,csf_ttau,csf_ptau')
    cohort.add_argument('--assessments', type=str, default=None, help='csv: id,mmse,cdr_global')
    cohort.add_argument('--scheme', type=str, default=None, help='staging scheme: mmse | cdr')

    task = argparse.ArgumentParser(add_help=False)
    task.add_argument('--task', type=str, default=None, help='binary (NC vs AD) | multi (NC, MCI, SD)')
    task.add_argument('--balance', action='store_true', default=None,
                      help='undersample every class to the smallest one (multi only)')

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument('--folds', type=int, default=None, help='cross-validation folds (default 5)')
    model.add_argument('--unstratified', dest='stratified', action='store_false', default=None,
                       help='assign folds without stratifying by class')
    model.add_argument('--rounds', type=int, default=None, help='boosting rounds / bags (default 30)')
    model.add_argument('--max-depth', dest='max_depth', type=int, default=None,
                       help='tree depth limit, 0 = unlimited (default 3 boosted, unlimited bagged)')
    model.add_argument('--min-leaf', dest='min_leaf', type=int, default=None, help='minimum rows per leaf')
    model.add_argument('--k', type=int, default=None, help='knn neighbours (default 100 coarse, 10 cosine)')
    model.add_argument('--C', dest='C', type=float, default=None, help='svm box constraint (default 1)')
    model.add_argument('--lam', type=float, default=None, help='logistic L2 penalty (default 1e-4)')
    model.add_argument('--num-cpu', dest='num_cpu', type=_num_cpu, default=None,
                       help="worker processes, integer or 'max' (default 1)")
    model.add_argument('--plots', action='store_true', default=None, help='also write png plots')

    parser = argparse.ArgumentParser(prog='csfml', description='Alzheimer stage classification from CSF biomarkers.')
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True
    commands.add_parser('stage', parents=[common, cohort, task], help='write staged.csv and class counts')
    commands.add_parser('summarize', parents=[common, cohort], help='group means / SEM and biomarker ANOVA')
    commands.add_parser('correlate', parents=[common, cohort], help='biomarker vs MMSE correlations')
    evaluate = commands.add_parser('evaluate', parents=[common, cohort, task, model],
                                   help='cross-validate one model')
    evaluate.add_argument('--model', type=str, default=None,
                          help='|'.join(kind.value for kind in ModelKind))
    commands.add_parser('compare', parents=[common, cohort, task, model], help='cross-validate the model set')
    synth = commands.add_parser('synth', parents=[common], help='generate a synthetic cohort')
    synth.add_argument('--preset', type=str, default=None, help='|'.join(PRESETS))
    synth.add_argument('--spec', type=str, default=None, help='json list of group moment specs')
    synth.add_argument('--scale', type=float, default=None, help='multiply every group size')
    return parser


def cli_values(args):
    values = vars(args).copy()
    for key in ('command', 'config'):
        values.pop(key, None)
    return values


# ===============================================================================
# Commands
# ===============================================================================

def load_records(config):
    biomarkers = parse_biomarker_csv(config.biomarkers)
    assessments = parse_assessment_csv(config.assessments)
    for name, parsed in (('biomarkers', biomarkers), ('assessments', assessments)):
        print("%s: %i rows read, %i skipped (missing / nonpositive), %i rejected" %
              (name, len(parsed.entries), parsed.skipped, len(parsed.rejected)))
        for line_number, reason in parsed.rejected:
            print("    line %i: %s" % (line_number, reason))
    records = merge_cohort(biomarkers, assessments)
    if not records:
        raise CohortError("no patient appears in both input files")
    print("merged cohort: %i patients" % len(records))
    return records


def load_dataset(config):
    data = make_task(load_records(config), config.scheme, config.task)
    if data.dropped:
        print("%i patients without a %s score dropped" % (data.dropped, config.scheme))
    if config.balance:
        data = undersample(data, config.seed)
    return data


def prepare_out_dir(config):
    os.makedirs(config.out_dir, exist_ok=True)
    reports.write_run_config(config, config.out_dir)
    return config.out_dir


def run_stage(config):
    data = load_dataset(config)
    counts = class_counts(data)
    out = prepare_out_dir(config)
    write_staged_csv(data, os.path.join(out, 'staged.csv'))
    reports.write_counts_csv(counts, os.path.join(out, 'counts.csv'))
    print(reports.counts_table(counts))


def run_summarize(config):
    records = load_records(config)
    summaries = group_summary(records, config.scheme)
    anova = biomarker_anova(records, config.scheme)
    out = prepare_out_dir(config)
    reports.write_summary_csv(summaries, os.path.join(out, 'summary.csv'), SUMMARY_VARIABLES)
    reports.write_anova_csv(anova, os.path.join(out, 'anova.csv'))
    rows = [[s.group.value, s.n] + ['NA' if s.mean[v] is None else
                                    '%.2f (%s)' % (s.mean[v], 'NA' if s.sem[v] is None else '%.2f' % s.sem[v])
                                    for v in SUMMARY_VARIABLES] for s in summaries]
    print(tabulate(rows, headers=['group', 'n'] + list(SUMMARY_VARIABLES), tablefmt='simple'))


def run_correlate(config):
    rows = correlation_table(load_records(config))
    out = prepare_out_dir(config)
    reports.write_correlations_csv(rows, os.path.join(out, 'correlations.csv'))
    table = [[r.variable, r.group, r.n, 'NA' if r.r is None else '%.3f' % r.r, 'NA' if r.p is None else '%.3g' % r.p]
             for r in rows]
    print(tabulate(table, headers=['variable', 'group', 'n', 'r', 'p'], tablefmt='simple'))


def roc_curves(result, class_names):
    if len(class_names) == 2:
        return {class_names[1]: roc(result.scores[:, 1], result.labels == 1)}
    return one_vs_rest_rocs(result.scores, result.labels, class_names)


def run_evaluate(config):
    data = load_dataset(config)
    spec = config.model_spec()
    plan = kfold(data.labels, config.folds, config.seed, config.stratified)
    logger = DataLog()
    ts = timer.time()
    result = cross_validate(spec, data, plan, num_cpu=config.num_cpu, logger=logger)
    report = metrics(result.confusion, result.scores, result.labels)
    curves = roc_curves(result, data.class_names)

    out = prepare_out_dir(config)
    reports.write_metrics_json(report, config, spec.kind.value, data.class_names, os.path.join(out, 'metrics.json'))
    reports.write_confusion_csv(result.confusion, os.path.join(out, 'confusion.csv'))
    reports.write_roc_csvs(curves, out)
    logger.save_log(out)
    if config.plots:
        aucs = {c.name: c.auc for c in report.per_class}
        make_result_plots.plot_roc(curves, out, aucs=aucs)
        make_result_plots.plot_confusion(result.confusion, out)
        make_result_plots.make_log_plots(log=logger.log, keys=['fold_accuracy'], save_loc=out)

    print("%s | %s %s | %i-fold%s" % (MODEL_TITLES[spec.kind], config.scheme, config.task, config.folds,
                                      '' if config.stratified else ' (unstratified)'))
    print(reports.metrics_table(report))
    print("time taken = %f" % (timer.time() - ts))


def _evaluate_model(spec, data, plan):
    result = cross_validate(spec, data, plan)
    return metrics(result.confusion, result.scores, result.labels)


def run_compare(config):
    data = load_dataset(config)
    plan = kfold(data.labels, config.folds, config.seed, config.stratified)
    specs = compare_specs(config)
    kinds = [spec.kind for spec in specs]
    ts = timer.time()
    jobs = [dict(spec=spec, data=data, plan=plan) for spec in specs]
    evaluated = run_jobs(_evaluate_model, jobs, num_cpu=config.num_cpu, suppress_print=False)
    results = [(kind.value, report) for kind, report in zip(kinds, evaluated)]

    out = prepare_out_dir(config)
    reports.write_compare_csv(results, data.class_names, os.path.join(out, 'compare.csv'))
    reports.write_compare_detail_csv(results, os.path.join(out, 'compare_detail.csv'))
    if config.plots:
        make_result_plots.plot_compare_metrics(results, out)

    titles = {kind.value: MODEL_TITLES[kind] for kind in kinds}
    print(reports.compare_table(results, data.class_names, titles))
    print("time taken = %f" % (timer.time() - ts))


def run_synth(config):
    specs = load_specs(config.spec) if config.spec is not None else PRESETS[config.preset]
    records = generate_cohort(specs, config.seed, scale=config.scale)
    out = prepare_out_dir(config)
    write_cohort_csvs(records, out)
    groups, counts = np.unique([r.id.split('-')[1] for r in records], return_counts=True)
    print(tabulate(list(zip(groups, counts)), headers=['group', 'n'], tablefmt='simple'))


COMMAND_HANDLERS = {
    'stage': run_stage,
    'summarize': run_summarize,
    'correlate': run_correlate,
    'evaluate': run_evaluate,
    'compare': run_compare,
    'synth': run_synth,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        config = resolve_config(args.command, cli_values(args), args.config)
        COMMAND_HANDLERS[config.command](config)
    except Exception as exc:
        print("csfml: error: %s" % exc, file=sys.stderr)
        return exit_code(exc)
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
