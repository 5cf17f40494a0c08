"""Paired significance tests: exact and chi-square McNemar, paired t-test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from ..errors import LengthMismatch, NoDiscordantPairs, ZeroVariance


class StatMethod(str, Enum):
    MCNEMAR_EXACT = "McNemarExact"
    MCNEMAR_CHI2 = "McNemarChi2"
    PAIRED_T = "PairedT"


@dataclass(frozen=True)
class PairedTestResult:
    statistic: float
    p_value: float
    method: StatMethod
    df: int | None = None

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "p_value": self.p_value, "method": self.method.value, "df": self.df}


def _check_counts(b: int, c: int) -> int:
    if b < 0 or c < 0:
        raise ValueError("discordant counts must be non-negative")
    if b + c == 0:
        raise NoDiscordantPairs("b + c = 0: the two systems never disagree")
    return b + c


def mcnemar_exact(b: int, c: int) -> PairedTestResult:
    """Two-sided exact binomial McNemar test on discordant counts ``b`` and ``c``."""
    n = _check_counts(b, c)
    k = min(b, c)
    tail = sum(math.comb(n, i) for i in range(k + 1))
    # integer / integer true division is correctly rounded even for huge n
    p = min(1.0, (2 * tail) / (1 << n))
    return PairedTestResult(statistic=float(k), p_value=max(p, math.ulp(0.0)), method=StatMethod.MCNEMAR_EXACT)


def mcnemar_chi2(b: int, c: int, continuity: bool = True) -> PairedTestResult:
    """Chi-square McNemar with optional Edwards continuity correction (1 df)."""
    n = _check_counts(b, c)
    diff = abs(b - c) - (1 if continuity else 0)
    stat = max(diff, 0) ** 2 / n
    p = math.erfc(math.sqrt(stat / 2))
    return PairedTestResult(statistic=stat, p_value=min(1.0, max(p, math.ulp(0.0))), method=StatMethod.MCNEMAR_CHI2, df=1)


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c, d = 1.0, 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > tiny else tiny)
    h = d
    for m in range(1, 10_000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    return betainc(df / 2.0, 0.5, df / (df + t * t))


def paired_t(xs: Sequence[float], ys: Sequence[float]) -> PairedTestResult:
    if len(xs) != len(ys):
        raise LengthMismatch(len(xs), len(ys))
    n = len(xs)
    if n < 2:
        raise ValueError("paired_t needs at least two pairs")
    d = [x - y for x, y in zip(xs, ys)]
    mean = sum(d) / n
    var = sum((v - mean) ** 2 for v in d) / (n - 1)
    if var == 0.0:
        raise ZeroVariance("all paired differences are identical")
    t = mean / math.sqrt(var / n)
    p = t_two_sided_p(t, n - 1)
    return PairedTestResult(statistic=t, p_value=min(1.0, max(p, math.ulp(0.0))), method=StatMethod.PAIRED_T, df=n - 1)
