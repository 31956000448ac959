"""Significance tests and effect sizes."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import stats as sps

from .core import ConfigurationError, UndefinedStatisticError

MCNEMAR_EXACT_MAX = 25


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    df: float


@dataclass(frozen=True)
class StatResult:
    t: float
    p_raw: float
    p_adjusted: float
    d: float
    n1: int
    n2: int
    mcnemar_b: int | None = None
    mcnemar_c: int | None = None


def _moments(x: Sequence[float]) -> tuple[int, float, float]:
    arr = np.asarray(x, dtype=np.float64)
    if arr.size < 2:
        raise UndefinedStatisticError("each sample needs at least two observations")
    return arr.size, float(arr.mean()), float(arr.var(ddof=1))


def ttest(a: Sequence[float], b: Sequence[float], equal_var: bool = False) -> TTestResult:
    """Two-sided unpaired t-test; Welch's unequal-variance form unless ``equal_var``.

    When both samples have zero variance the statistic is 0 with p = 1 if the
    means agree, and undefined otherwise.
    """
    n1, m1, v1 = _moments(a)
    n2, m2, v2 = _moments(b)
    diff = m1 - m2
    if equal_var:
        sp2 = ((n1 - 1) * v1 + (n2 - 1) * v2) / (n1 + n2 - 2)
        se2 = sp2 * (1 / n1 + 1 / n2)
        df = float(n1 + n2 - 2)
    else:
        q1, q2 = v1 / n1, v2 / n2
        se2 = q1 + q2
        df = se2**2 / (q1**2 / (n1 - 1) + q2**2 / (n2 - 1)) if se2 > 0 else float(n1 + n2 - 2)
    if se2 == 0:
        if diff == 0:
            return TTestResult(0.0, 1.0, df)
        raise UndefinedStatisticError("t statistic undefined: both samples are constant with different means")
    t = diff / math.sqrt(se2)
    p = float(min(1.0, 2.0 * sps.t.sf(abs(t), df)))
    return TTestResult(float(t), p, float(df))


def cohens_d(a: Sequence[float], b: Sequence[float]) -> float:
    """Standardised mean difference using the (n-1)-weighted pooled SD."""
    n1, m1, v1 = _moments(a)
    n2, m2, v2 = _moments(b)
    pooled = math.sqrt(((n1 - 1) * v1 + (n2 - 1) * v2) / (n1 + n2 - 2))
    if pooled == 0:
        raise UndefinedStatisticError("Cohen's d undefined: pooled standard deviation is zero")
    return (m1 - m2) / pooled


def bonferroni(p: float, m: int) -> float:
    if not 0.0 <= p <= 1.0:
        raise ConfigurationError(f"p-value {p} outside [0, 1]")
    if m < 1:
        raise ConfigurationError("Bonferroni family size must be >= 1")
    return min(1.0, m * p)


@dataclass(frozen=True)
class McNemarResult:
    b: int
    c: int
    p: float
    method: str  # "exact" | "chi2"
    statistic: float | None = None
    zero_discordance: bool = False


def mcnemar(b: int, c: int, exact_max: int = MCNEMAR_EXACT_MAX) -> McNemarResult:
    """McNemar test on discordant counts ``b`` and ``c``.

    Exact two-sided binomial test while ``b + c <= exact_max``; above that the
    continuity-corrected chi-square approximation.
    """
    if b < 0 or c < 0:
        raise ConfigurationError("discordant counts must be non-negative")
    n = b + c
    if n == 0:
        return McNemarResult(b, c, 1.0, "exact", zero_discordance=True)
    if n <= exact_max:
        tail = sum(math.comb(n, i) for i in range(min(b, c) + 1))
        p = min(Fraction(1), 2 * Fraction(tail, 2**n))
        return McNemarResult(b, c, float(p), "exact")
    stat = (abs(b - c) - 1) ** 2 / n
    return McNemarResult(b, c, float(sps.chi2.sf(stat, 1)), "chi2", statistic=float(stat))


def discordant_counts(a: Sequence[int], b: Sequence[int]) -> tuple[int, int]:
    """Counts of (a right, b wrong) and (a wrong, b right) over paired 0/1 outcomes."""
    if len(a) != len(b):
        raise ConfigurationError(f"correctness vectors differ in length: {len(a)} vs {len(b)}")
    only_a = sum(1 for x, y in zip(a, b) if x and not y)
    only_b = sum(1 for x, y in zip(a, b) if y and not x)
    return only_a, only_b
