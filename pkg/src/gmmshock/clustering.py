"""Unsupervised-learning core: Lloyd k-means, Gaussian-mixture EM with
overlap deletion, and penalized-likelihood model-selection metrics.

The EM implementation works in log space (log-sum-exp normalization) and
regularizes every covariance with eps*I so densities stay finite for
degenerate point sets. Cluster pairs whose centroids coincide to within
``overlap_tol`` componentwise are collapsed after each M step; the mixture
weights are renormalized and the event is recorded so callers can reseed
the slot on a later fit.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

DEFAULT_EPS = 1e-8
DEFAULT_DELTA = 1e-4
DEFAULT_OVERLAP_TOL = 2e-5
_EMPTY_CLUSTER_TOL = 1e-10
_CHUNK = 1 << 15


class ClusteringError(RuntimeError):
    """Fit could not produce a usable mixture."""


@dataclass
class GaussianMixture:
    """Weights, means and covariances of K components over R^v features."""

    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    regularization: float = DEFAULT_EPS

    @property
    def n_clusters(self) -> int:
        return self.means.shape[0]

    @property
    def n_features(self) -> int:
        return self.means.shape[1]

    def copy(self) -> "GaussianMixture":
        return GaussianMixture(self.weights.copy(), self.means.copy(),
                               self.covariances.copy(), self.regularization)


@dataclass
class FitDiagnostics:
    iterations: int = 0
    converged: bool = False
    log_likelihood: float = -np.inf
    history: list = field(default_factory=list)
    deleted: list = field(default_factory=list)  # (iteration, original cluster index)


def kmeans_fit(points, n_clusters: int, max_iters: int = 100, centroids=None, rng=None):
    """Lloyd iterations; stops when the assignments no longer change.

    A supplied ``centroids`` array acts as a warm start and is a fixed
    point of the iteration when it already solves the problem. Empty
    clusters are re-seeded at the point farthest from its own centroid.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ClusteringError("k-means needs a non-empty (N, v) point matrix")
    if n_clusters < 1:
        raise ClusteringError("k-means needs at least one cluster")
    n_distinct = np.unique(points, axis=0).shape[0]
    if n_clusters > n_distinct:
        warnings.warn(
            f"requested {n_clusters} clusters for {n_distinct} distinct points; "
            f"continuing with {n_distinct}", RuntimeWarning, stacklevel=2)
        n_clusters = n_distinct
    if centroids is None:
        rng = np.random.default_rng(rng)
        take = rng.choice(points.shape[0], size=n_clusters, replace=False)
        centroids = points[take]
    else:
        centroids = np.array(centroids, dtype=float)

    def assign(c):
        d2 = ((points[:, None, :] - c[None, :, :]) ** 2).sum(axis=2)
        return d2.argmin(axis=1), d2

    labels, d2 = assign(centroids)
    for _ in range(max_iters):
        for j in range(n_clusters):
            sel = labels == j
            if sel.any():
                centroids[j] = points[sel].mean(axis=0)
            else:
                centroids[j] = points[d2[np.arange(points.shape[0]), labels].argmax()]
        new_labels, d2 = assign(centroids)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return centroids, labels


def _cholesky_pieces(mixture: GaussianMixture):
    """Inverse Cholesky factors and log-determinants of the covariances."""
    try:
        chol = np.linalg.cholesky(mixture.covariances)
    except np.linalg.LinAlgError as exc:
        raise ClusteringError("covariance matrix is not positive definite") from exc
    logdet = 2.0 * np.log(np.diagonal(chol, axis1=1, axis2=2)).sum(axis=1)
    eye = np.eye(mixture.n_features)
    inv_chol = np.empty_like(chol)
    for j in range(chol.shape[0]):
        inv_chol[j] = np.linalg.solve(chol[j], eye)
    return inv_chol, logdet


def _log_resp_chunk(points, mixture, inv_chol, logdet):
    v = points.shape[1]
    base = -0.5 * (v * np.log(2.0 * np.pi) + logdet) + np.log(mixture.weights)
    if v == 2:
        # the common two-feature space: unrolled quadratic form beats the
        # strided batched matmuls by a wide margin
        prec = np.matmul(inv_chol.transpose(0, 2, 1), inv_chol)  # (K, 2, 2)
        d0 = points[:, 0][None, :] - mixture.means[:, 0][:, None]
        d1 = points[:, 1][None, :] - mixture.means[:, 1][:, None]
        quad = prec[:, 0, 0, None] * d0 * d0 \
            + 2.0 * prec[:, 0, 1, None] * d0 * d1 \
            + prec[:, 1, 1, None] * d1 * d1
    else:
        diff = points[None, :, :] - mixture.means[:, None, :]  # (K, N, v)
        y = np.matmul(diff, inv_chol.transpose(0, 2, 1))
        quad = np.square(y).sum(axis=2)
    return (base[:, None] - 0.5 * quad).T


def gmm_estep(points, mixture: GaussianMixture, n_threads: int = 1):
    """Log-likelihood and responsibilities; rows of R sum to one.

    Rows may be processed in independent chunks (the reduction is a plain
    sum accumulated in a fixed order, so the result is deterministic for a
    fixed thread count).
    """
    points = np.asarray(points, dtype=float)
    inv_chol, logdet = _cholesky_pieces(mixture)
    chunks = [slice(i, min(i + _CHUNK, points.shape[0]))
              for i in range(0, points.shape[0], _CHUNK)]
    if n_threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            parts = list(pool.map(
                lambda s: _log_resp_chunk(points[s], mixture, inv_chol, logdet), chunks))
    else:
        parts = [_log_resp_chunk(points[s], mixture, inv_chol, logdet) for s in chunks]
    log_r = parts[0] if len(parts) == 1 else np.concatenate(parts, axis=0)
    top = log_r.max(axis=1, keepdims=True)
    norm = top + np.log(np.exp(log_r - top).sum(axis=1, keepdims=True))
    log_l = float(norm.sum())
    return log_l, np.exp(log_r - norm)


def gmm_mstep(points, responsibilities, eps: float = DEFAULT_EPS):
    """Closed-form mixture update from responsibilities.

    Returns (weights, means, covariances, empty_mask); clusters whose
    responsibility mass vanishes are flagged instead of updated.
    """
    points = np.asarray(points, dtype=float)
    r = np.asarray(responsibilities, dtype=float)
    n, v = points.shape
    nj = r.sum(axis=0)
    empty = nj <= _EMPTY_CLUSTER_TOL
    nj_safe = np.where(empty, 1.0, nj)
    weights = nj / n
    means = (r.T @ points) / nj_safe[:, None]
    if v == 2:
        d0 = points[:, 0][None, :] - means[:, 0][:, None]      # (K, N)
        d1 = points[:, 1][None, :] - means[:, 1][:, None]
        rt = r.T
        cov = np.empty((r.shape[1], 2, 2))
        cov[:, 0, 0] = (rt * d0 * d0).sum(axis=1) / nj_safe
        cov[:, 0, 1] = cov[:, 1, 0] = (rt * d0 * d1).sum(axis=1) / nj_safe
        cov[:, 1, 1] = (rt * d1 * d1).sum(axis=1) / nj_safe
    else:
        diff = points[None, :, :] - means[:, None, :]          # (K, N, v)
        weighted = diff * r.T[:, :, None]
        cov = np.matmul(weighted.transpose(0, 2, 1), diff) / nj_safe[:, None, None]
    cov += eps * np.eye(v)
    return weights, means, cov, empty


def _delete_clusters(mixture: GaussianMixture, drop_mask):
    keep = ~drop_mask
    if not keep.any():
        raise ClusteringError("all clusters were deleted")
    mixture.weights = mixture.weights[keep]
    mixture.weights = mixture.weights / mixture.weights.sum()
    mixture.means = mixture.means[keep]
    mixture.covariances = mixture.covariances[keep]
    return np.flatnonzero(drop_mask)


def _overlap_mask(means, tol):
    k = means.shape[0]
    drop = np.zeros(k, dtype=bool)
    for i in range(k):
        if drop[i]:
            continue
        for j in range(i + 1, k):
            if not drop[j] and np.all(np.abs(means[i] - means[j]) < tol):
                drop[j] = True
    return drop


def gmm_fit(points, mixture: GaussianMixture, max_iters: int = 200,
            eps: float = DEFAULT_EPS, delta: float = DEFAULT_DELTA,
            overlap_tol: float = DEFAULT_OVERLAP_TOL, n_threads: int = 1):
    """EM iterations with overlap deletion and a relative-change stop.

    The stop test uses |logL - prev| / max(|logL|, 1) < delta, which is
    well-behaved for either sign of the log-likelihood. Between deletion
    events the log-likelihood is non-decreasing (standard EM monotonicity).
    """
    points = np.asarray(points, dtype=float)
    mixture = mixture.copy()
    mixture.regularization = eps
    diag = FitDiagnostics()
    prev = None
    original = list(range(mixture.n_clusters))  # live slot -> original index
    for it in range(1, max_iters + 1):
        diag.iterations = it
        log_l, resp = gmm_estep(points, mixture, n_threads=n_threads)
        diag.log_likelihood = log_l
        diag.history.append(log_l)
        weights, means, cov, empty = gmm_mstep(points, resp, eps=eps)
        mixture.weights, mixture.means, mixture.covariances = weights, means, cov
        drop = empty | _overlap_mask(means, overlap_tol)
        if drop.any():
            try:
                dropped = _delete_clusters(mixture, drop)
            except ClusteringError:
                mixture = _single_cluster_fallback(points, eps)
                diag.deleted.extend((it, original[d]) for d in np.flatnonzero(drop))
                original = [-1]
                prev = None
                continue
            diag.deleted.extend((it, original[d]) for d in dropped)
            original = [o for o, dead in zip(original, drop) if not dead]
            prev = None  # deletion breaks the monotone segment
            continue
        if prev is not None and abs(log_l - prev) / max(abs(log_l), 1.0) < delta:
            diag.converged = True
            break
        prev = log_l
    return mixture, diag


def _single_cluster_fallback(points, eps):
    mean = points.mean(axis=0, keepdims=True)
    diff = points - mean
    cov = (diff.T @ diff) / points.shape[0] + eps * np.eye(points.shape[1])
    return GaussianMixture(np.array([1.0]), mean.copy(), cov[None, :, :], eps)


def mixture_from_kmeans(points, n_clusters: int, eps: float = DEFAULT_EPS, rng=None,
                        max_iters: int = 100) -> GaussianMixture:
    """Cold-start mixture: k-means centroids, per-cluster covariances."""
    points = np.asarray(points, dtype=float)
    centroids, labels = kmeans_fit(points, n_clusters, max_iters=max_iters, rng=rng)
    k, v = centroids.shape
    weights = np.empty(k)
    cov = np.empty((k, v, v))
    for j in range(k):
        sel = labels == j
        weights[j] = max(sel.sum(), 1) / points.shape[0]
        diff = points[sel] - centroids[j]
        cov[j] = (diff.T @ diff) / max(sel.sum(), 1) + eps * np.eye(v)
    weights /= weights.sum()
    return GaussianMixture(weights, centroids, cov, eps)


def model_selection_metrics(points, mixture: GaussianMixture, log_l: float = None):
    """(AIC, BIC, N_p) for a fitted mixture on its training points.

    N_p counts weights (K - 1 free), means (K v) and symmetric covariances
    (K v (v+1) / 2).
    """
    points = np.asarray(points, dtype=float)
    if log_l is None:
        log_l, _ = gmm_estep(points, mixture)
    k, v = mixture.n_clusters, mixture.n_features
    n_params = k + k * v + k * v * (v + 1) // 2 - 1
    aic = -2.0 * log_l + 2.0 * n_params
    bic = -2.0 * log_l + n_params * np.log(points.shape[0])
    return aic, bic, n_params
