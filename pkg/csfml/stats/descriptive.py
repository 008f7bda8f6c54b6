"""
Per-group summaries (mean and standard error) and the correlation / ANOVA
tables computed over staged patient records.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from csfml.data.cohort import Scheme, Stage, four_way_stage
from csfml.stats.inference import anova_oneway, pearson
from csfml.utils.errors import StatsError

SUMMARY_VARIABLES = ('age', 'mmse', 'abeta42', 'ttau', 'ptau', 'ratio')
BIOMARKER_VARIABLES = ('abeta42', 'ttau', 'ptau', 'ratio')
ALL_GROUP = 'ALL'


def record_value(record, variable):
    if variable == 'age':
        return record.age
    if variable == 'mmse':
        return record.assessment.mmse
    if variable == 'cdr_global':
        return record.assessment.cdr_global
    return getattr(record.panel, variable)


def variable_vector(records, variable):
    values = [record_value(r, variable) for r in records]
    return np.array([v for v in values if v is not None], dtype=float)


def mean_sem(values):
    """(mean, sem) with sem = sd / sqrt(n), sample sd; None marks an undefined entry."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n == 0:
        return None, None
    mean = float(values.mean())
    if n < 2:
        return mean, None
    return mean, float(values.std(ddof=1) / math.sqrt(n))


@dataclass(frozen=True)
class GroupSummary:
    group: Stage
    n: int
    mean: dict
    sem: dict


def group_records(records, scheme):
    """Four-way stage groups in Stage order; records without the scheme's score are left out."""
    groups = {stage: [] for stage in Stage}
    for record in records:
        stage = four_way_stage(record, scheme)
        if stage is not None:
            groups[stage].append(record)
    return groups


def group_summary(records, scheme=Scheme.MMSE, variables=SUMMARY_VARIABLES):
    summaries = []
    for stage, members in group_records(records, scheme).items():
        if not members:
            continue
        means, sems = {}, {}
        for variable in variables:
            means[variable], sems[variable] = mean_sem(variable_vector(members, variable))
        summaries.append(GroupSummary(group=stage, n=len(members), mean=means, sem=sems))
    return summaries


@dataclass(frozen=True)
class CorrelationRow:
    variable: str
    group: str
    r: Optional[float]
    p: Optional[float]
    n: int


def _paired(records, variable, against):
    pairs = [(record_value(r, variable), record_value(r, against)) for r in records]
    pairs = [(a, b) for a, b in pairs if a is not None and b is not None]
    x = np.array([a for a, _ in pairs], dtype=float)
    y = np.array([b for _, b in pairs], dtype=float)
    return x, y


def correlation_table(records, variables=BIOMARKER_VARIABLES, against='mmse'):
    """
    Pearson r of every biomarker variable against MMSE, over all records and
    within each MMSE stage group. Undefined correlations get r = p = None.
    """
    groups = [(ALL_GROUP, list(records))]
    groups += [(stage.value, members) for stage, members in group_records(records, Scheme.MMSE).items()]
    rows = []
    for variable in variables:
        for name, members in groups:
            x, y = _paired(members, variable, against)
            try:
                result = pearson(x, y)
                rows.append(CorrelationRow(variable, name, result.r, result.p, result.n))
            except StatsError:
                rows.append(CorrelationRow(variable, name, None, None, int(x.size)))
    return rows


@dataclass(frozen=True)
class AnovaRow:
    variable: str
    groups: tuple
    f_stat: Optional[float]
    df_between: Optional[int]
    df_within: Optional[int]
    p: Optional[float]


def biomarker_anova(records, scheme=Scheme.MMSE, variables=BIOMARKER_VARIABLES):
    """One-way ANOVA of each biomarker across the stage groups having at least 2 members."""
    groups = [(stage.value, members) for stage, members in group_records(records, scheme).items()
              if len(members) >= 2]
    rows = []
    for variable in variables:
        names = tuple(name for name, _ in groups)
        try:
            result = anova_oneway([variable_vector(members, variable) for _, members in groups])
            rows.append(AnovaRow(variable, names, result.f_stat, result.df_between, result.df_within, result.p))
        except StatsError:
            rows.append(AnovaRow(variable, names, None, None, None, None))
    return rows
