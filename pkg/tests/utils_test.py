import json
import math
import os

import numpy as np
import pandas as pd
import pytest

from csfml.config import RunConfig
from csfml.evaluation.metrics import ConfusionMatrix, metrics, roc
from csfml.stats.descriptive import AnovaRow, CorrelationRow
from csfml.utils import make_result_plots, reports
from csfml.utils.logger import DataLog
from csfml.utils.parallel import run_jobs


def square_with_offset(x, offset=0):
    return x * x + offset


def failing_job(x):
    raise ValueError("job %i failed" % x)


def test_data_log_round_trip(tmp_path):
    logger = DataLog()
    for fold in range(3):
        logger.log_kv('fold', fold)
        logger.log_kv('fold_accuracy', 0.5 + 0.1 * fold)
    logger.log_kv('oob_fraction', 0.37)
    assert logger.max_len == 3
    assert logger.get_current_log() == {'fold': 2, 'fold_accuracy': pytest.approx(0.7), 'oob_fraction': 0.37}

    logger.save_log(str(tmp_path))
    assert os.path.isfile(str(tmp_path / 'log.pickle'))
    frame = pd.read_csv(str(tmp_path / 'log.csv'))
    assert list(frame.columns) == ['iteration', 'fold', 'fold_accuracy', 'oob_fraction']

    reread = DataLog()
    reread.read_log(str(tmp_path / 'log.csv'))
    assert reread.log['fold'] == [0, 1, 2]
    assert reread.log['oob_fraction'] == [0.37]
    assert reread.max_len == 3


def test_run_jobs_keeps_input_order():
    jobs = [dict(x=x, offset=1) for x in range(8)]
    serial = run_jobs(square_with_offset, jobs, num_cpu=1)
    parallel = run_jobs(square_with_offset, jobs, num_cpu=2)
    assert serial == parallel == [x * x + 1 for x in range(8)]


def test_run_jobs_surfaces_failures():
    with pytest.raises(ValueError):
        run_jobs(failing_job, [dict(x=1), dict(x=2)], num_cpu=2)
    with pytest.raises(ValueError):
        run_jobs(failing_job, [dict(x=1)], num_cpu=1)


def test_csv_marks_undefined_values(tmp_path):
    rows = [CorrelationRow('abeta42', 'NC', None, None, 4), CorrelationRow('abeta42', 'ALL', 0.5, 0.01, 40)]
    path = reports.write_correlations_csv(rows, str(tmp_path / 'correlations.csv'))
    with open(path) as f:
        lines = f.read().splitlines()
    assert lines[1] == 'abeta42,NC,NA,NA,4,NA'
    assert lines[2] == 'abeta42,ALL,0.5,0.01,40,true'

    path = reports.write_correlations_csv(rows, str(tmp_path / 'strict.csv'), alpha=0.001)
    with open(path) as f:
        assert f.read().splitlines()[2] == 'abeta42,ALL,0.5,0.01,40,false'

    anova = [AnovaRow('ttau', ('NC', 'MCI'), math.inf, 1, 3, 0.0)]
    path = reports.write_anova_csv(anova, str(tmp_path / 'anova.csv'))
    with open(path) as f:
        assert f.read().splitlines()[1] == 'ttau,NC;MCI,inf,1,3,0,true'


def test_metrics_json_uses_null(tmp_path):
    # class B is never predicted: its predictive rates are undefined
    cm = ConfusionMatrix(np.array([[3, 0], [2, 0]]), ('NC', 'AD'))
    config = RunConfig(command='evaluate', model='logistic', out_dir=str(tmp_path), num_cpu=4)
    path = reports.write_metrics_json(metrics(cm), config, 'logistic', cm.class_names, str(tmp_path / 'm.json'))
    with open(path) as f:
        payload = json.load(f)
    assert payload['accuracy'] == pytest.approx(0.6)
    assert payload['per_class'][1]['ppv'] is None and payload['per_class'][1]['tpr'] == 0.0
    assert payload['auc'] is None
    assert 'num_cpu' not in payload['config'] and payload['config']['model'] == 'logistic'


def test_result_plots(tmp_path):
    save_loc = str(tmp_path)
    cm = ConfusionMatrix(np.array([[5, 1], [2, 4]]), ('NC', 'AD'))
    curve = roc(np.array([0.9, 0.8, 0.3, 0.2]), np.array([True, False, True, False]))
    assert os.path.isfile(make_result_plots.plot_roc({'AD': curve}, save_loc, aucs={'AD': 0.75}))
    assert os.path.isfile(make_result_plots.plot_confusion(cm, save_loc))
    report = metrics(cm)
    assert os.path.isfile(make_result_plots.plot_compare_metrics([('boosted', report), ('bagged', report)],
                                                                 save_loc))

    logger = DataLog()
    for fold in range(3):
        logger.log_kv('fold', fold)
        logger.log_kv('fold_accuracy', 0.8)
    logger.save_log(save_loc)
    saved = make_result_plots.make_log_plots(log_path=str(tmp_path / 'log.csv'), keys=['fold_accuracy', 'absent'],
                                             save_loc=save_loc)
    assert saved == [os.path.join(save_loc, 'fold_accuracy.png')]
