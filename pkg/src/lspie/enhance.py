"""Latent ranking, scaling, clustering and condensing.

Clustering works on a pairwise distance between latent directions, either
``1 - |cos|`` of the loadings or ``1 - |corr|`` of the score columns. Both are
sign-blind, because a latent direction and its negation describe the same
latent variable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.cluster import hierarchy
from scipy.cluster.vq import kmeans2
from scipy.spatial.distance import squareform

from .errors import DegenerateDataError, InvalidArgumentError
from .lvm import LatentModel
from .metrics import evaluate
from .postfilter import FilterSpec, apply_filter
from .signals import TrajectoryMatrix

__all__ = [
    "RankedModel",
    "ScaledModel",
    "CondensedModel",
    "rank",
    "scale",
    "cluster",
    "condense",
    "apply_condense_filter",
    "direction_distances",
    "dbscan_precomputed",
    "as_latent_model",
    "LCON_EPS",
    "LCON_MIN_MEMBERS",
]

LCON_EPS = 0.2
LCON_MIN_MEMBERS = 1


@dataclass(frozen=True)
class RankedModel:
    """A model whose directions were reordered by a metric.

    ``permutation[i]`` is the original index of the direction now at ``i``.
    """

    base: LatentModel
    metric: object
    permutation: np.ndarray
    order: str = "descending"


@dataclass(frozen=True)
class ScaledModel:
    base: LatentModel
    scaled_loadings: np.ndarray
    scale_factors: np.ndarray
    metric: object = None


@dataclass(frozen=True)
class CondensedModel:
    """Directions merged cluster by cluster.

    ``merged_loadings[c] == sum(member_signs[c][j] * L[clusters[c][j]])``,
    where ``L`` are the directions that were clustered.
    """

    clusters: tuple
    merged_loadings: np.ndarray
    member_signs: tuple
    K: int
    method: str
    filter_applied: bool = False
    filter_spec: FilterSpec | None = None

    def assignments(self):
        """``(original_index, cluster_id, sign)`` triples sorted by index."""
        rows = [(int(i), c, int(s)) for c, (members, signs) in
                enumerate(zip(self.clusters, self.member_signs)) for i, s in zip(members, signs)]
        return sorted(rows)


def _base_model(model):
    if isinstance(model, (RankedModel, ScaledModel)):
        return model.base
    return model


def _directions(model):
    if isinstance(model, ScaledModel):
        return model.scaled_loadings
    return _base_model(model).loadings


def rank(model, metric="variance_explained", X=None, order="descending"):
    """Reorder latent directions by a metric.

    Ties keep their original relative order.
    """
    if order not in ("descending", "ascending"):
        raise InvalidArgumentError(f"order must be 'descending' or 'ascending', got {order!r}")
    base = _base_model(model)
    mv = evaluate(base, metric, X)
    key = -mv.values if order == "descending" else mv.values
    perm = np.argsort(key, kind="stable")
    return RankedModel(base.permuted(perm), mv.permuted(perm), perm, order)


def scale(model, metric="variance_explained", X=None, divide=False):
    """Scale each direction by its scaling score ``s_j``.

    The default multiplies (``s_j * L_j``), which emphasises directions that
    carry a large share of the metric. ``divide=True`` gives ``L_j / s_j``.
    """
    base = _base_model(model)
    mv = evaluate(base, metric, X)
    if not np.any(mv.values):
        raise DegenerateDataError(f"metric {mv.metric_name!r} is zero for every direction")
    s = mv.scores
    factors = 1.0 / s if divide else s
    return ScaledModel(base, base.loadings * factors[:, None], factors, mv)


def direction_distances(model, similarity="abs_cosine"):
    """Pairwise ``1 - |cos|`` (loadings) or ``1 - |corr|`` (scores), clipped to [0, 1]."""
    if similarity == "abs_cosine":
        L = _directions(model)
        norms = np.linalg.norm(L, axis=1)
        if np.any(norms == 0):
            raise DegenerateDataError("cannot compare a zero-length latent direction")
        U = L / norms[:, None]
        sim = np.abs(U @ U.T)
    elif similarity == "score_correlation":
        S = _base_model(model).scores
        if np.any(S.std(axis=0) == 0):
            raise DegenerateDataError("a score column has zero variance")
        sim = np.abs(np.atleast_2d(np.corrcoef(S.T)))
    else:
        raise InvalidArgumentError(
            f"similarity must be 'abs_cosine' or 'score_correlation', got {similarity!r}")
    D = np.clip(1.0 - sim, 0.0, 1.0)
    np.fill_diagonal(D, 0.0)
    return (D + D.T) / 2


def _canonical_labels(labels):
    """Relabel so cluster ids follow the order of each cluster's smallest member."""
    mapping = {}
    for lab in labels:
        mapping.setdefault(int(lab), len(mapping))
    return np.array([mapping[int(lab)] for lab in labels])


def _merge(L, labels, method):
    clusters, signs, merged = [], [], []
    norms = np.linalg.norm(L, axis=1)
    for c in range(labels.max() + 1):
        members = np.flatnonzero(labels == c)
        ref = members[np.argmax(norms[members])]
        sg = np.where(L[members] @ L[ref] >= 0, 1, -1)
        clusters.append(tuple(int(i) for i in members))
        signs.append(tuple(int(s) for s in sg))
        merged.append(sg @ L[members])
    return CondensedModel(tuple(clusters), np.array(merged), tuple(signs), len(clusters), method)


def _kmeans_labels(D, K, seed, restarts=20):
    # each direction is described by its similarity profile to all others
    feats = 1.0 - D
    best, best_inertia = None, np.inf
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        centroids, labels = kmeans2(feats, K, minit="++", seed=rng)
        if np.unique(labels).size != K:
            continue
        inertia = ((feats - centroids[labels]) ** 2).sum()
        if inertia < best_inertia:
            best, best_inertia = labels, inertia
    if best is None:
        raise DegenerateDataError(f"k-means could not find {K} non-empty clusters")
    return best


def cluster(model, K, similarity="abs_cosine", backend="agglomerative", seed=0):
    """Merge the directions into exactly ``K`` clusters.

    The agglomerative backend is complete linkage on the direction distances.
    Inside each cluster, members are flipped to agree in sign with the
    largest-norm member and then summed.
    """
    L = _directions(model)
    M = L.shape[0]
    if int(K) != K or not 1 <= K <= M:
        raise InvalidArgumentError(f"K must be an integer in [1, {M}], got {K}")
    K = int(K)
    D = direction_distances(model, similarity)
    if K == M:
        labels = np.arange(M)
    elif backend == "agglomerative":
        Z = hierarchy.linkage(squareform(D, checks=False), method="complete")
        labels = hierarchy.cut_tree(Z, n_clusters=K).ravel()
    elif backend == "kmeans":
        labels = _kmeans_labels(D, K, seed)
    else:
        raise InvalidArgumentError(f"backend must be 'agglomerative' or 'kmeans', got {backend!r}")
    return _merge(L, _canonical_labels(labels), "lc")


def dbscan_precomputed(D, eps, min_members):
    """DBSCAN on a precomputed distance matrix.

    Returns labels with ``-1`` for noise. Neighbourhoods are ``D <= eps`` and
    include the point itself.
    """
    n = D.shape[0]
    neigh = [np.flatnonzero(D[i] <= eps) for i in range(n)]
    core = np.array([len(nb) >= min_members for nb in neigh])
    labels = np.full(n, -1)
    current = 0
    for i in range(n):
        if labels[i] != -1 or not core[i]:
            continue
        labels[i] = current
        stack = [i]
        while stack:
            p = stack.pop()
            if not core[p]:
                continue
            for q in neigh[p]:
                if labels[q] == -1:
                    labels[q] = current
                    stack.append(q)
        current += 1
    return labels


def condense(model, similarity="abs_cosine", eps=LCON_EPS, min_members=LCON_MIN_MEMBERS):
    """Merge directions into an automatically chosen number of clusters.

    Clusters come from DBSCAN on the direction distances; points DBSCAN
    labels as noise stay as singleton clusters.
    """
    if not eps > 0:
        raise InvalidArgumentError(f"eps must be > 0, got {eps}")
    if int(min_members) != min_members or min_members < 1:
        raise InvalidArgumentError(f"min_members must be an integer >= 1, got {min_members}")
    L = _directions(model)
    D = direction_distances(model, similarity)
    labels = dbscan_precomputed(D, eps, int(min_members))
    noise = np.flatnonzero(labels == -1)
    labels[noise] = labels.max() + 1 + np.arange(noise.size)
    return _merge(L, _canonical_labels(labels), "lcon")


def apply_condense_filter(condensed, filter_spec):
    """Lowpass-filter every merged direction; ``None`` leaves the model as is."""
    if filter_spec is None:
        return condensed
    merged = np.array([apply_filter(row, filter_spec) for row in condensed.merged_loadings])
    return replace(condensed, merged_loadings=merged, filter_applied=True, filter_spec=filter_spec)


def as_latent_model(condensed, X, mean=None):
    """View merged directions as a :class:`LatentModel` with unit loadings."""
    L = condensed.merged_loadings
    norms = np.linalg.norm(L, axis=1)
    if np.any(norms == 0):
        raise DegenerateDataError("a merged direction cancelled to zero")
    L = L / norms[:, None]
    data = X.data if isinstance(X, TrajectoryMatrix) else np.asarray(X, dtype=float)
    if mean is None:
        mean = np.zeros(L.shape[1])
    return LatentModel("condensed", L, data @ L.T, None, mean)
