"""Correlation and ordinary least squares with exact t-test p-values.

The t distribution tail is evaluated through the regularized incomplete
beta function (Lentz continued fraction), so no stats dependency is
needed at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import UndefinedCorrelationError, ValidationError
from ..validation import as_float_vector

_EPS = 3e-16
_FPMIN = 1e-300
_MAX_ITER = 300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    return h


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_p_value_two_sided(t_stat: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValidationError(f"degrees of freedom must be positive, got {df}")
    if math.isinf(t_stat):
        return 0.0
    return betainc_reg(df / 2.0, 0.5, df / (df + t_stat * t_stat))


def pearson(x, y) -> float:
    """Product-moment correlation of two equal-length vectors."""
    xv = as_float_vector(x, "x", min_len=3)
    yv = as_float_vector(y, "y", min_len=3)
    if xv.shape[0] != yv.shape[0]:
        raise ValidationError(f"length mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    xc = xv - xv.mean()
    yc = yv - yv.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx <= 0.0 or syy <= 0.0:
        raise UndefinedCorrelationError("correlation undefined for zero-variance input")
    r = float(xc @ yc) / math.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def point_biserial(x: np.ndarray, y: np.ndarray) -> float:
    """Correlation against a binary label; 0.0 when x has no variance."""
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx <= 0.0 or syy <= 0.0:
        return 0.0
    return float(np.clip(float(xc @ yc) / math.sqrt(sxx * syy), -1.0, 1.0))


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    t_stat: float
    p_value: float
    adj_r2: float
    n: int


def linear_regression(x, y) -> RegressionResult:
    """OLS of y on x with a two-sided t test on the slope.

    A perfect fit yields t = +/-inf and p = 0. Degenerate (constant) x
    is rejected.
    """
    xv = as_float_vector(x, "x", min_len=3)
    yv = as_float_vector(y, "y", min_len=3)
    if xv.shape[0] != yv.shape[0]:
        raise ValidationError(f"length mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    n = xv.shape[0]
    xc = xv - xv.mean()
    sxx = float(xc @ xc)
    if sxx <= 0.0:
        raise ValidationError("x is degenerate (zero variance)")
    yc = yv - yv.mean()
    syy = float(yc @ yc)
    slope = float(xc @ yc) / sxx
    intercept = float(yv.mean() - slope * xv.mean())
    resid = yv - (intercept + slope * xv)
    rss = float(resid @ resid)
    df = n - 2
    sigma2 = rss / df
    se = math.sqrt(sigma2 / sxx)
    if se > 0.0:
        t_stat = slope / se
        p_value = t_p_value_two_sided(t_stat, df)
    else:
        t_stat = math.inf if slope > 0 else (-math.inf if slope < 0 else 0.0)
        p_value = 0.0 if slope != 0 else 1.0
    if syy > 0.0:
        r2 = 1.0 - rss / syy
    else:
        r2 = 1.0 if rss == 0.0 else 0.0
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / (n - 2)
    return RegressionResult(slope=slope, intercept=intercept, t_stat=float(t_stat),
                            p_value=float(p_value), adj_r2=float(adj_r2), n=n)
