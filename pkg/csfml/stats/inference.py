"""
Pearson correlation and one-way ANOVA.
p-values come from the regularized incomplete beta function, which is what
the Student-t and F cumulative distributions reduce to.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.special as special

from csfml.utils.errors import StatsError


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p: float
    n: int


@dataclass(frozen=True)
class AnovaResult:
    """f_stat is math.inf when all within-group variance is zero but the groups differ."""
    f_stat: float
    df_between: int
    df_within: int
    p: float


def t_sf_two_sided(t, df):
    """P(|T| >= |t|) for Student-t with df degrees of freedom."""
    if math.isinf(t):
        return 0.0
    return float(special.betainc(0.5 * df, 0.5, df / (df + t * t)))


def f_sf(f, df1, df2):
    """P(F >= f) for the F(df1, df2) distribution."""
    if math.isinf(f):
        return 0.0
    if f <= 0:
        return 1.0
    return float(special.betainc(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * f)))


def pearson(x, y):
    """
    :param x, y:    equal length real vectors, n >= 3, neither constant
    :return:        CorrelationResult with two-sided p from t = r sqrt((n-2)/(1-r^2))
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise StatsError("pearson needs equal lengths, got %i and %i" % (x.size, y.size))
    n = x.size
    if n < 3:
        raise StatsError("pearson needs at least 3 pairs, got %i" % n)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = np.dot(dx, dx), np.dot(dy, dy)
    if sxx == 0 or syy == 0:
        raise StatsError("pearson undefined for a constant vector (zero variance)")
    r = float(np.dot(dx, dy) / math.sqrt(sxx * syy))
    r = min(1.0, max(-1.0, r))

    df = n - 2
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = r * math.sqrt(df / (1.0 - r * r))
        p = t_sf_two_sided(t, df)
    return CorrelationResult(r=r, p=p, n=n)


def anova_oneway(groups):
    """
    :param groups:  list of real vectors, at least 2 groups of at least 2 values
    :return:        AnovaResult
    """
    groups = [np.asarray(g, dtype=float).ravel() for g in groups]
    k = len(groups)
    if k < 2:
        raise StatsError("anova needs at least 2 groups, got %i" % k)
    if min(g.size for g in groups) < 2:
        raise StatsError("anova needs at least 2 values per group")
    total = np.concatenate(groups)
    n = total.size
    if n <= k:
        raise StatsError("anova needs more values than groups")

    grand_mean = total.mean()
    ss_between = float(sum(g.size * (g.mean() - grand_mean) ** 2 for g in groups))
    ss_within = float(sum(np.sum((g - g.mean()) ** 2) for g in groups))
    df_between, df_within = k - 1, n - k

    if ss_within <= np.finfo(float).eps * (ss_between + ss_within):
        if ss_between > 0:
            return AnovaResult(f_stat=math.inf, df_between=df_between, df_within=df_within, p=0.0)
        return AnovaResult(f_stat=0.0, df_between=df_between, df_within=df_within, p=1.0)

    f_stat = (ss_between / df_between) / (ss_within / df_within)
    return AnovaResult(f_stat=f_stat, df_between=df_between, df_within=df_within,
                       p=f_sf(f_stat, df_between, df_within))
