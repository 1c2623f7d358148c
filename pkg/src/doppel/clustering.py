"""K-means partitioning of impersonators into bot and fan populations.

Features are standardized, clustered with seeded k-means++ plus Lloyd
iterations, the cluster count picked by the elbow of the WCSS curve, and
the two clusters labeled by which centroid looks more fan-like (higher
follower count, photo and username similarity).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError
from .records import PostRecord, ProfileRecord
from .similarity import SimilarityReport

CLUSTER_FEATURE_NAMES = (
    "sim_username",
    "sim_full_name",
    "sim_biography",
    "sim_photo",
    "has_external_url",
    "msf",
    "lsf",
    "avg_received_like",
    "avg_hashtag_length",
    "avg_caption_length",
    "avg_received_comment",
    "account_age_days",
    "follower_count",
    "followee_count",
    "media_count",
    "is_private",
    "is_verified",
)

# indices used by label_clusters' fan-vs-bot composite
_LABEL_FEATURES = ("follower_count", "sim_photo", "sim_username")


def build_cluster_features(
    profile: ProfileRecord,
    report: SimilarityReport,
    posts: list[PostRecord],
    msf: int = 0,
    lsf: int = 0,
) -> np.ndarray:
    """Assemble the fixed-order 17-feature vector for one impersonator.

    Post-derived averages are 0 for an account with no collected posts.
    avg_hashtag_length is the mean number of hashtags per post and
    avg_caption_length the mean caption character count.
    """
    if posts:
        avg_like = float(np.mean([p.like_count for p in posts]))
        avg_hashtag = float(np.mean([len(p.hashtags) for p in posts]))
        avg_caption = float(np.mean([len(p.caption) for p in posts]))
        avg_comment = float(np.mean([p.comment_count for p in posts]))
    else:
        avg_like = avg_hashtag = avg_caption = avg_comment = 0.0
    return np.array([
        report.sim_username,
        report.sim_full_name,
        report.sim_biography,
        1.0 if report.photo_similar else 0.0,
        1.0 if profile.has_external_url else 0.0,
        float(msf),
        float(lsf),
        avg_like,
        avg_hashtag,
        avg_caption,
        avg_comment,
        float(profile.account_age_days),
        float(profile.follower_count),
        float(profile.followee_count),
        float(profile.media_count),
        1.0 if profile.is_private else 0.0,
        1.0 if profile.is_verified else 0.0,
    ], dtype=float)


def standardize(matrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Column z-scores with population std; constant columns stay at 0.

    Returns (z, means, stds) with stds recorded as 1 for constant columns
    so the transform is always invertible.
    """
    X = np.asarray(matrix, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("standardize needs an n x d matrix with n >= 2")
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    constant = stds == 0.0
    if constant.any():
        warnings.warn(f"{int(constant.sum())} constant feature column(s); std pinned to 1")
        stds = np.where(constant, 1.0, stds)
    return (X - means) / stds, means, stds


@dataclass
class ClusterModel:
    """Fitted k-means model in standardized feature space."""

    k: int
    centroids: np.ndarray
    assignments: np.ndarray
    wcss: float
    wcss_history: list[float]
    feature_means: np.ndarray | None = None
    feature_stds: np.ndarray | None = None
    labels: dict[int, str] = field(default_factory=dict)


def _nearest(X, centroids):
    d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1), d2


def _wcss(d2, assign):
    return float(d2[np.arange(len(assign)), assign].sum())


def _kmeans_pp_init(X, k, rng):
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    centroids[0] = X[rng.integers(n)]
    closest = ((X - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=closest / total)
        centroids[j] = X[idx]
        closest = np.minimum(closest, ((X - centroids[j]) ** 2).sum(axis=1))
    return centroids


def kmeans(matrix, k: int, seed: int, max_iters: int = 300, tol: float = 1e-6,
           init=None) -> ClusterModel:
    """Seeded k-means++ then Lloyd iterations until the centroid shift

    drops below tol. Empty clusters are re-seeded to the point farthest
    from its assigned centroid. WCSS is recorded after every assignment
    step and is non-increasing."""
    X = np.asarray(matrix, dtype=float)
    if not np.isfinite(X).all():
        raise NumericError("k-means input contains non-finite values")
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(X, k, rng) if init is None else np.array(init, dtype=float)
    history = []
    assign = np.zeros(n, dtype=int)
    for _ in range(max_iters):
        assign, d2 = _nearest(X, centroids)
        # re-seed empty clusters with the worst-fit point
        for j in range(k):
            if not (assign == j).any():
                worst = d2[np.arange(n), assign].argmax()
                centroids[j] = X[worst]
                assign, d2 = _nearest(X, centroids)
        history.append(_wcss(d2, assign))
        new_centroids = np.vstack([X[assign == j].mean(axis=0) for j in range(k)])
        shift = np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max()
        centroids = new_centroids
        if shift < tol:
            break
    assign, d2 = _nearest(X, centroids)
    history.append(_wcss(d2, assign))
    return ClusterModel(
        k=k,
        centroids=centroids,
        assignments=assign,
        wcss=history[-1],
        wcss_history=history,
    )


def fit_best(matrix, k, seed, restarts=5, warm_start=None):
    """Best-of-restarts k-means; extra warm start from a (k-1)-cluster

    solution plus the worst-fit point guarantees WCSS(k) <= WCSS(k-1)."""
    best = None
    for r in range(restarts):
        model = kmeans(matrix, k, seed=seed * 1000 + k * 10 + r)
        if best is None or model.wcss < best.wcss:
            best = model
    if warm_start is not None and warm_start.k == k - 1:
        X = np.asarray(matrix, dtype=float)
        _, d2 = _nearest(X, warm_start.centroids)
        worst = d2.min(axis=1).argmax()
        init = np.vstack([warm_start.centroids, X[worst]])
        model = kmeans(matrix, k, seed=seed, init=init)
        if model.wcss < best.wcss:
            best = model
    return best


def elbow_select(matrix, k_range=range(1, 9), seed: int = 0, restarts: int = 5):
    """Pick the knee of the WCSS-vs-k curve.

    WCSS(k) is the best of `restarts` seeded runs (plus a warm start from
    k-1); the knee is the interior k with the largest perpendicular
    distance to the chord joining the curve's endpoints. Ties go to the
    smallest k. Returns (k_star, {k: wcss}).
    """
    ks = sorted(k_range)
    if len(ks) < 3:
        raise ValueError("elbow selection needs at least 3 candidate k values")
    n = np.asarray(matrix).shape[0]
    if ks[-1] > n:
        raise ValueError("largest k exceeds the number of points")
    curve = {}
    prev = None
    for k in ks:
        model = fit_best(matrix, k, seed=seed, restarts=restarts, warm_start=prev)
        curve[k] = model.wcss
        prev = model
    x0, y0 = ks[0], curve[ks[0]]
    x1, y1 = ks[-1], curve[ks[-1]]
    chord = np.hypot(x1 - x0, y1 - y0)
    best_k, best_dist = None, -1.0
    for k in ks[1:-1]:
        dist = abs((y1 - y0) * k - (x1 - x0) * curve[k] + x1 * y0 - y1 * x0)
        dist = dist / chord if chord > 0 else 0.0
        if dist > best_dist + 1e-12:
            best_k, best_dist = k, dist
    return best_k, curve


def label_clusters(model: ClusterModel, matrix=None) -> ClusterModel:
    """Name the fan and bot clusters of a two-cluster model.

    The centroid with the higher standardized follower-count + photo
    similarity + username similarity composite is the fan cluster. Labels
    follow centroids, never the arbitrary cluster indices.
    """
    if model.k != 2:
        raise ValueError("labeling defined for two clusters")
    idx = [CLUSTER_FEATURE_NAMES.index(name) for name in _LABEL_FEATURES]
    composite = model.centroids[:, idx].sum(axis=1)
    fan = int(composite.argmax())
    model.labels = {fan: "fan", 1 - fan: "bot"}
    return model


def assignment_table(model: ClusterModel, matrix):
    """Per-point cluster, label, distance and outlier flag.

    A point is flagged when its distance to its centroid exceeds 3x the
    median such distance; flagged points are reported, not removed.
    """
    X = np.asarray(matrix, dtype=float)
    assign, d2 = _nearest(X, model.centroids)
    dist = np.sqrt(d2[np.arange(len(assign)), assign])
    median = float(np.median(dist))
    outlier = dist > 3.0 * median
    labels = [model.labels.get(int(a), f"cluster{int(a)}") for a in assign]
    return assign, labels, dist, outlier
