import math

import numpy as np
import pytest
from scipy import stats

from csfml.data.cohort import AssessmentRecord, BiomarkerPanel, PatientRecord, Scheme, Stage
from csfml.data.synth import TABLE1, generate_cohort
from csfml.stats.descriptive import (ALL_GROUP, BIOMARKER_VARIABLES, biomarker_anova, correlation_table,
                                     group_summary, mean_sem)
from csfml.stats.inference import anova_oneway, f_sf, pearson, t_sf_two_sided
from csfml.utils.errors import StatsError


def brute_force_pearson(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    r = sxy / math.sqrt(sxx * syy)
    t = r * math.sqrt((n - 2) / (1 - r * r))
    return r, 2 * stats.t.sf(abs(t), n - 2)


def brute_force_anova(groups):
    values = [v for g in groups for v in g]
    grand = sum(values) / len(values)
    means = [sum(g) / len(g) for g in groups]
    ss_between = sum(len(g) * (m - grand) ** 2 for g, m in zip(groups, means))
    ss_within = sum((v - m) ** 2 for g, m in zip(groups, means) for v in g)
    df1, df2 = len(groups) - 1, len(values) - len(groups)
    f = (ss_between / df1) / (ss_within / df2)
    return f, stats.f.sf(f, df1, df2)


def test_pearson_matches_definition():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = int(rng.integers(3, 51))
        x = rng.normal(size=n)
        y = 0.5 * x * rng.uniform(-1, 1) + rng.normal(size=n)
        result = pearson(x, y)
        r, p = brute_force_pearson(list(x), list(y))
        assert result.r == pytest.approx(r, abs=1e-10)
        assert result.p == pytest.approx(p, abs=1e-10)
        assert result.n == n


def test_pearson_edge_cases():
    assert pearson([1, 2, 3, 4], [2, 4, 6, 8]).r == pytest.approx(1.0)
    assert pearson([1, 2, 3, 4], [2, 4, 6, 8]).p == 0.0
    assert pearson([1, 2, 3, 4], [8, 6, 4, 2]).r == pytest.approx(-1.0)
    with pytest.raises(StatsError):
        pearson([1, 1, 1, 1], [1, 2, 3, 4])
    with pytest.raises(StatsError):
        pearson([1, 2], [3, 4])
    with pytest.raises(StatsError):
        pearson([1, 2, 3], [1, 2])


def test_anova_matches_definition():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        k = int(rng.integers(2, 6))
        groups = [list(rng.normal(rng.normal(), 1.0, size=int(rng.integers(2, 15)))) for _ in range(k)]
        result = anova_oneway(groups)
        f, p = brute_force_anova(groups)
        assert result.f_stat == pytest.approx(f, rel=1e-10, abs=1e-10)
        assert result.p == pytest.approx(p, abs=1e-10)
        assert result.df_between == k - 1
        assert result.df_within == sum(len(g) for g in groups) - k


def test_two_group_anova_is_squared_t():
    rng = np.random.default_rng(2)
    for _ in range(100):
        a = rng.normal(size=int(rng.integers(2, 20)))
        b = rng.normal(0.5, size=int(rng.integers(2, 20)))
        t = stats.ttest_ind(a, b, equal_var=True).statistic
        result = anova_oneway([a, b])
        assert result.f_stat == pytest.approx(t * t, rel=1e-10, abs=1e-10)


def test_anova_degenerate_groups():
    result = anova_oneway([[2, 2, 2], [5, 5]])
    assert result.f_stat == math.inf and result.p == 0.0
    result = anova_oneway([[3, 3], [3, 3, 3]])
    assert result.f_stat == 0.0 and result.p == 1.0
    with pytest.raises(StatsError):
        anova_oneway([[1, 2, 3]])
    with pytest.raises(StatsError):
        anova_oneway([[1, 2], [3]])


def test_distribution_tails():
    assert t_sf_two_sided(0.0, 10) == pytest.approx(1.0)
    assert t_sf_two_sided(2.228, 10) == pytest.approx(0.05, abs=1e-4)
    assert f_sf(0.0, 2, 10) == 1.0
    assert f_sf(4.103, 2, 10) == pytest.approx(0.05, abs=1e-4)
    assert f_sf(math.inf, 2, 10) == 0.0


def test_mean_sem():
    assert mean_sem([]) == (None, None)
    assert mean_sem([4.0]) == (4.0, None)
    mean, sem = mean_sem([1.0, 2.0, 3.0, 6.0])
    assert mean == 3.0
    assert sem == pytest.approx(np.std([1, 2, 3, 6], ddof=1) / 2)


def test_group_summary():
    records = [PatientRecord('A', 60.0, BiomarkerPanel(400, 100, 20), AssessmentRecord(mmse=29, cdr_global=0)),
               PatientRecord('B', 70.0, BiomarkerPanel(300, 120, 30), AssessmentRecord(mmse=27, cdr_global=0)),
               PatientRecord('C', 80.0, BiomarkerPanel(200, 300, 50), AssessmentRecord(mmse=12, cdr_global=0.5))]
    summaries = group_summary(records, Scheme.MMSE)
    assert [s.group for s in summaries] == [Stage.NC, Stage.MOD]
    nc = summaries[0]
    assert nc.n == 2
    assert nc.mean['abeta42'] == 350.0
    assert nc.sem['abeta42'] == pytest.approx(50.0)
    assert nc.mean['ratio'] == pytest.approx(15.0)
    assert summaries[1].sem['age'] is None
    # staged by cdr, C moves to MCI
    assert [s.group for s in group_summary(records, Scheme.CDR)] == [Stage.NC, Stage.MCI]


def test_correlation_table():
    records = generate_cohort(TABLE1, seed=3)
    rows = correlation_table(records)
    assert len(rows) == len(BIOMARKER_VARIABLES) * 5
    everyone = [r for r in rows if r.group == ALL_GROUP]
    assert [r.variable for r in everyone] == list(BIOMARKER_VARIABLES)
    assert all(r.n == 440 for r in everyone)
    abeta = next(r for r in everyone if r.variable == 'abeta42')
    x = [r.panel.abeta42 for r in records]
    y = [r.assessment.mmse for r in records]
    assert abeta.r == pytest.approx(brute_force_pearson(x, y)[0], abs=1e-10)
    assert abeta.r > 0 and abeta.p < 0.05


def test_correlation_with_constant_group_is_undefined():
    records = [PatientRecord('P%i' % i, 70.0, BiomarkerPanel(300 + i, 100 + 3 * i, 20 + i),
                             AssessmentRecord(mmse=28)) for i in range(4)]
    rows = correlation_table(records)
    nc = [r for r in rows if r.group == 'NC']
    assert all(r.r is None and r.p is None and r.n == 4 for r in nc)


def test_biomarker_anova():
    records = generate_cohort(TABLE1, seed=3)
    rows = biomarker_anova(records, Scheme.MMSE)
    assert [r.variable for r in rows] == list(BIOMARKER_VARIABLES)
    abeta = rows[0]
    assert abeta.groups == ('NC', 'MCI', 'MOD', 'SD')
    assert abeta.df_between == 3 and abeta.df_within == 436
    assert abeta.p < 0.05
