"""
Synthetic cohorts with the published per-group moments.
Each group's variables are drawn independently (no covariances are known),
biomarkers from normals truncated below at 1 pg/ml.
"""

import json
import math
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import stats

from csfml.data.cohort import (ASSESSMENT_HEADER, BIOMARKER_HEADER, STAGE_TO_CDR,
                               AssessmentRecord, BiomarkerPanel, PatientRecord, Stage)
from csfml.utils.errors import SynthError

CONCENTRATION_FLOOR = 1.0
AGE_FLOOR = 18.0
MMSE_BANDS = {Stage.NC: (26, 30), Stage.MCI: (20, 25), Stage.MOD: (10, 19), Stage.SD: (0, 9)}
BIOMARKERS = ('abeta42', 'ttau', 'ptau')
MOMENT_KEYS = ('age', 'mmse') + BIOMARKERS


@dataclass(frozen=True)
class GroupMomentSpec:
    """
    stage:      group stage
    n:          group size
    moments:    variable -> (mean, sem) for age, mmse, abeta42, ttau, ptau
    """
    stage: Stage
    n: int
    moments: dict

    def __post_init__(self):
        object.__setattr__(self, 'stage', Stage(self.stage))
        if self.n < 2:
            raise SynthError("group %s: n must be >= 2, got %i" % (self.stage.value, self.n))
        missing = [k for k in MOMENT_KEYS if k not in self.moments]
        if missing:
            raise SynthError("group %s: missing moments for %s" % (self.stage.value, ', '.join(missing)))
        for key in MOMENT_KEYS:
            mean, sem = self.moments[key]
            if not mean > 0:
                raise SynthError("group %s: mean of %s must be positive, got %r" % (self.stage.value, key, mean))
            if not sem > 0:
                raise SynthError("group %s: sem of %s must be positive, got %r" % (self.stage.value, key, sem))

    def sd(self, key):
        return self.moments[key][1] * math.sqrt(self.n)


# mean (sem) per group as published
TABLE1 = (
    GroupMomentSpec(Stage.SD, 20, {
        'age': (68.41, 2.51), 'mmse': (5.58, 0.88), 'abeta42': (232.88, 38.28),
        'ttau': (321.99, 133.25), 'ptau': (42.5, 4.92)}),
    GroupMomentSpec(Stage.MOD, 101, {
        'age': (69.43, 0.78), 'mmse': (16.35, 0.24), 'abeta42': (193.72, 8.57),
        'ttau': (195.5, 24.64), 'ptau': (53.13, 2.75)}),
    GroupMomentSpec(Stage.MCI, 152, {
        'age': (71.23, 0.75), 'mmse': (22.72, 0.09), 'abeta42': (226.43, 2.51),
        'ttau': (261.3, 42.06), 'ptau': (45.24, 3.17)}),
    GroupMomentSpec(Stage.NC, 167, {
        'age': (66.85, 0.44), 'mmse': (28.47, 0.06), 'abeta42': (369.7, 10.00),
        'ttau': (150.8, 9.73), 'ptau': (37.97, 1.06)}),
)

PRESETS = {'table1': TABLE1}


def _truncated_normal(mean, sd, floor, size, rng):
    a = (floor - mean) / sd
    return stats.truncnorm.rvs(a, np.inf, loc=mean, scale=sd, size=size, random_state=rng)


def generate_cohort(specs, seed, scale=1.0):
    """
    :param specs:   iterable of GroupMomentSpec
    :param seed:    random seed (int)
    :param scale:   multiplies every group size (rounded, at least 2)
    :return:        list of PatientRecord sorted by id
    """
    specs = list(specs)
    if len(specs) == 0:
        raise SynthError("need at least one group spec")
    if not scale > 0:
        raise SynthError("scale must be positive, got %r" % scale)

    rng = np.random.default_rng(seed)
    records = []
    for spec in specs:
        n = max(2, int(round(spec.n * scale)))
        draws = {key: _truncated_normal(spec.moments[key][0], spec.sd(key), CONCENTRATION_FLOOR, n, rng)
                 for key in BIOMARKERS}
        age = _truncated_normal(spec.moments['age'][0], spec.sd('age'), AGE_FLOOR, n, rng)
        low, high = MMSE_BANDS[spec.stage]
        mmse = np.clip(np.rint(rng.normal(spec.moments['mmse'][0], spec.sd('mmse'), size=n)), low, high)
        for i in range(n):
            panel = BiomarkerPanel(float(draws['abeta42'][i]), float(draws['ttau'][i]), float(draws['ptau'][i]))
            assessment = AssessmentRecord(mmse=int(mmse[i]), cdr_global=STAGE_TO_CDR[spec.stage])
            records.append(PatientRecord(id='SYN-%s-%04i' % (spec.stage.value, i + 1),
                                         age=float(age[i]), panel=panel, assessment=assessment))
    records.sort(key=lambda r: r.id)
    return records


def load_specs(path):
    """
    JSON list of {"stage": "NC", "n": 167, "moments": {"abeta42": [369.7, 10.0], ...}}
    """
    with open(path) as f:
        raw = json.load(f)
    if not isinstance(raw, list):
        raise SynthError("%s: expected a list of group specs" % path)
    try:
        return [GroupMomentSpec(Stage(g['stage']), int(g['n']),
                                {k: tuple(float(x) for x in v) for k, v in g['moments'].items()})
                for g in raw]
    except SynthError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise SynthError("%s: malformed group spec (%s)" % (path, e))


def _format_rating(value):
    return '%g' % value


def write_cohort_csvs(records, out_dir):
    """Writes biomarkers.csv and assessments.csv in the canonical formats."""
    os.makedirs(out_dir, exist_ok=True)
    biomarkers = pd.DataFrame([[r.id, r.age, r.panel.abeta42, r.panel.ttau, r.panel.ptau] for r in records],
                              columns=BIOMARKER_HEADER)
    assessments = pd.DataFrame(
        [[r.id,
          '' if r.assessment.mmse is None else str(r.assessment.mmse),
          '' if r.assessment.cdr_global is None else _format_rating(r.assessment.cdr_global)]
         for r in records], columns=ASSESSMENT_HEADER)
    biomarker_path = os.path.join(out_dir, 'biomarkers.csv')
    assessment_path = os.path.join(out_dir, 'assessments.csv')
    biomarkers.to_csv(biomarker_path, index=False, float_format='%.4f', lineterminator='\n')
    assessments.to_csv(assessment_path, index=False, lineterminator='\n')
    return biomarker_path, assessment_path
