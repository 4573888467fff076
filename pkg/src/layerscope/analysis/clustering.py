"""Spectral clustering of activation profiles.

RBF affinity, symmetric normalized Laplacian, eigenvectors by cyclic
Jacobi rotation, row normalization, then seeded k-means++ on the
embedding. Everything is deterministic given the seed; no library
clustering is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from ..exceptions import ConvergenceError, ValidationError
from ..rng import Rng
from ..validation import as_float_matrix, check_positive_int

JACOBI_MAX_SWEEPS = 100
KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 100


def jacobi_eigh(matrix, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, eigenvectors as columns). Raises
    ConvergenceError if the off-diagonal mass has not vanished after
    ``max_sweeps`` sweeps.
    """
    A = as_float_matrix(matrix, "matrix").copy()
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValidationError(f"matrix must be square, got {A.shape}")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-10 * max(1.0, float(np.abs(A).max()))):
        raise ValidationError("matrix must be symmetric")
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    if n == 1:
        return A.diagonal().copy(), V
    scale = max(1.0, float(np.abs(A).max()))
    tol = 1e-14 * scale

    converged = False
    for sweep in range(max_sweeps + 1):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off <= tol * n:
            converged = True
            break
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) \
                    if theta != 0.0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = A[:, p].copy()
                rot_q = A[:, q].copy()
                A[:, p] = c * rot_p - s * rot_q
                A[:, q] = s * rot_p + c * rot_q
                rot_p = A[p, :].copy()
                rot_q = A[q, :].copy()
                A[p, :] = c * rot_p - s * rot_q
                A[q, :] = s * rot_p + c * rot_q
                vec_p = V[:, p].copy()
                vec_q = V[:, q].copy()
                V[:, p] = c * vec_p - s * vec_q
                V[:, q] = s * vec_p + c * vec_q
    if not converged:
        raise ConvergenceError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")
    eigvals = A.diagonal().copy()
    order = np.argsort(eigvals, kind="stable")
    return eigvals[order], V[:, order]


def _kmeans_once(X: np.ndarray, k: int, rng: Rng, max_iter: int):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.below(n)]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            idx = rng.below(n)
        else:
            u = rng.uniform(0.0, total)
            idx = int(np.searchsorted(np.cumsum(d2), u, side="right"))
            idx = min(idx, n - 1)
        centers[c] = X[idx]
        d2 = np.minimum(d2, np.sum((X - centers[c]) ** 2, axis=1))

    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        dists = np.sum((X[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(dists, axis=1)
        own = dists[np.arange(n), new_labels]
        moved = False
        for c in range(k):
            members = new_labels == c
            if not np.any(members):
                far = int(np.argmax(own))
                centers[c] = X[far]
                moved = True
            else:
                centers[c] = X[members].mean(axis=0)
        if not moved and np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    dists = np.sum((X[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    labels = np.argmin(dists, axis=1)
    inertia = float(dists[np.arange(n), labels].sum())
    return labels, inertia


def kmeans_pp(X: np.ndarray, k: int, seed: int, restarts: int = KMEANS_RESTARTS,
              max_iter: int = KMEANS_MAX_ITER):
    """Best-of-``restarts`` k-means++ labels; fully determined by the seed."""
    if X.shape[0] < k:
        raise ValidationError(f"need at least k={k} points, got {X.shape[0]}")
    rng = Rng(seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(restarts):
        labels, inertia = _kmeans_once(X, k, rng, max_iter)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return best_labels, best_inertia


@dataclass(frozen=True)
class ClusterResult:
    assignments: np.ndarray
    k: int
    gamma: float
    embedding: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.assignments, dtype=np.int64)
        if a.ndim != 1 or a.shape[0] == 0:
            raise ValidationError("assignments must be a non-empty vector")
        if np.any(a < 0) or np.any(a >= self.k):
            raise ValidationError(f"cluster ids must lie in [0, {self.k})")
        object.__setattr__(self, "assignments", a)


def spectral_cluster(profiles, gamma: float = 1e-10, k: int = 2,
                     seed: int = 0) -> ClusterResult:
    """Cluster profile rows; see module docstring for the exact pipeline."""
    P = as_float_matrix(profiles, "profiles")
    check_positive_int(k, "k")
    if k < 2:
        raise ValidationError("clustering needs k >= 2")
    n = P.shape[0]
    if n < k:
        raise ValidationError(f"need at least k={k} profile rows, got {n}")
    if not (np.isfinite(gamma) and gamma > 0):
        raise ValidationError(f"gamma must be positive and finite, got {gamma}")

    sq = np.sum(P * P, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (P @ P.T), 0.0)
    affinity = np.exp(-gamma * d2)
    degree = affinity.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(degree)
    laplacian = np.eye(n) - inv_sqrt[:, None] * affinity * inv_sqrt[None, :]
    _, vectors = jacobi_eigh(laplacian)
    embedding = vectors[:, :k].copy()
    norms = np.linalg.norm(embedding, axis=1)
    nonzero = norms > 0.0
    embedding[nonzero] /= norms[nonzero, None]
    labels, _ = kmeans_pp(embedding, k, seed)
    return ClusterResult(assignments=labels, k=k, gamma=float(gamma), embedding=embedding)


class ProfileClusterer(BaseEstimator, ClusterMixin):
    """Estimator facade over :func:`spectral_cluster`."""

    def __init__(self, n_clusters: int = 2, gamma: float = 1e-10, random_state: int = 0):
        self.n_clusters = n_clusters
        self.gamma = gamma
        self.random_state = random_state

    def fit(self, X, y=None):
        result = spectral_cluster(X, gamma=self.gamma, k=self.n_clusters,
                                  seed=self.random_state)
        self.labels_ = result.assignments
        self.embedding_ = result.embedding
        self.result_ = result
        return self
