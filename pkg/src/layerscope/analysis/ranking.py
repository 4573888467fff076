"""Ranking latent variables against a binary annotation.

A ridge-regularized logistic regression (fit by iteratively reweighted
least squares) scores every latent entry by |coefficient|; if the solver
leaves the finite domain, a point-biserial correlation per variable
provides the fallback ranking, reported as such.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ..exceptions import ValidationError
from ..validation import as_float_matrix, as_float_vector
from .stats import point_biserial


@dataclass(frozen=True)
class RankedLatent:
    index: int
    coefficient: float
    score: float


@dataclass(frozen=True)
class RankingResult:
    entries: tuple[RankedLatent, ...]
    method: str  # "irls" or "point_biserial"
    converged: bool
    n_iter: int

    @property
    def order(self) -> list[int]:
        return [e.index for e in self.entries]


def _irls(X: np.ndarray, y: np.ndarray, ridge: float, max_iter: int, tol: float):
    """Newton/IRLS for penalized logistic; intercept unpenalized.

    Returns (weights incl. intercept at 0, converged, n_iter, finite).
    """
    n, d = X.shape
    Xd = np.hstack([np.ones((n, 1)), X])
    w = np.zeros(d + 1)
    penalty = np.full(d + 1, ridge)
    penalty[0] = 0.0
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        eta = np.clip(Xd @ w, -35.0, 35.0)
        mu = 1.0 / (1.0 + np.exp(-eta))
        s = np.maximum(mu * (1.0 - mu), 1e-12)
        grad = Xd.T @ (y - mu) - penalty * w
        hess = (Xd.T * s) @ Xd + np.diag(penalty)
        try:
            delta = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            return w, False, n_iter, False
        w = w + delta
        if not np.all(np.isfinite(w)):
            return w, False, n_iter, False
        if float(np.linalg.norm(delta)) <= tol * (1.0 + float(np.linalg.norm(w))):
            return w, True, n_iter, True
    return w, False, n_iter, True


def _ranked(indices: np.ndarray, coefficients: np.ndarray) -> tuple[RankedLatent, ...]:
    scores = np.abs(coefficients)
    # descending score, ties resolved toward the lower index
    order = np.lexsort((indices, -scores))
    return tuple(
        RankedLatent(index=int(indices[i]), coefficient=float(coefficients[i]),
                     score=float(scores[i]))
        for i in order
    )


def rank_latents(latents, presence, ridge: float = 1e-3, max_iter: int = 50,
                 tol: float = 1e-8) -> RankingResult:
    """Rank latent entries by how strongly they predict ``presence``."""
    X = as_float_matrix(latents, "latents")
    y = as_float_vector(presence, "presence")
    n, d = X.shape
    if y.shape[0] != n:
        raise ValidationError(f"presence length {y.shape[0]} does not match {n} samples")
    if n < 50:
        raise ValidationError(f"need at least 50 samples, got {n}")
    classes = np.unique(y)
    if not np.all(np.isin(classes, (0.0, 1.0))):
        raise ValidationError("presence must be binary (0/1)")
    if classes.shape[0] < 2:
        raise ValidationError("presence must contain both classes")

    w, converged, n_iter, finite = _irls(X, y, ridge, max_iter, tol)
    indices = np.arange(d)
    if finite:
        return RankingResult(entries=_ranked(indices, w[1:]), method="irls",
                             converged=converged, n_iter=n_iter)
    corr = np.array([point_biserial(X[:, j], y) for j in range(d)])
    return RankingResult(entries=_ranked(indices, corr), method="point_biserial",
                         converged=False, n_iter=n_iter)


class LatentRanker(BaseEstimator):
    """Estimator facade over :func:`rank_latents`."""

    def __init__(self, ridge: float = 1e-3, max_iter: int = 50, tol: float = 1e-8):
        self.ridge = ridge
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y):
        result = rank_latents(X, y, ridge=self.ridge, max_iter=self.max_iter, tol=self.tol)
        coef = np.empty(len(result.entries))
        for entry in result.entries:
            coef[entry.index] = entry.coefficient
        self.coef_ = coef
        self.ranking_ = result
        self.method_ = result.method
        self.converged_ = result.converged
        self.n_features_in_ = coef.shape[0]
        return self

    def top_indices(self, n: int = 10) -> list[int]:
        if not hasattr(self, "ranking_"):
            raise ValidationError("LatentRanker is not fitted")
        return result_order(self.ranking_)[:n]


def result_order(result: RankingResult) -> list[int]:
    return result.order
