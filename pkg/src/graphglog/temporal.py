"""Edge-node probability, time-slice entropy, and clustering of configurations."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning

from .errors import BadK, DegenerateData, DimensionMismatch, EmptySeries, IndexOutOfRange
from .glog import EdgeNodeConfiguration

__all__ = [
    "EdgeNodeProbability",
    "EntropyDiagram",
    "ClusterResult",
    "configuration_matrix",
    "edge_node_probability",
    "observed_probability",
    "slice_entropy",
    "entropy_diagram",
    "silhouette",
    "cluster_configurations",
    "select_k_by_silhouette",
    "enhance_signal",
]

KMEANS_RESTARTS = 20
KMEANS_MAX_ITER = 300


@dataclass(frozen=True)
class EdgeNodeProbability:
    p_e: np.ndarray
    m: int

    @property
    def n(self) -> int:
        return self.p_e.shape[0]


@dataclass(frozen=True)
class EntropyDiagram:
    entropy: np.ndarray
    labels: tuple
    clusters: Optional[np.ndarray] = None

    def with_clusters(self, clusters) -> "EntropyDiagram":
        clusters = np.asarray(clusters, dtype=np.int64)
        if clusters.shape != self.entropy.shape:
            raise DimensionMismatch("one cluster label per slice is required")
        return EntropyDiagram(self.entropy, self.labels, clusters)


@dataclass(frozen=True)
class ClusterResult:
    labels: np.ndarray
    k: int
    silhouette: float
    centroids: np.ndarray
    inertia: float


def configuration_matrix(configs) -> np.ndarray:
    """Stack configurations into an ``(m, n)`` uint8 matrix.

    Accepts a sequence of :class:`EdgeNodeConfiguration`, a sequence of 0/1
    vectors, or an ``(m, n)`` array.
    """
    if isinstance(configs, np.ndarray):
        mat = configs
    else:
        rows = [c.bits if isinstance(c, EdgeNodeConfiguration) else c for c in configs]
        if not rows:
            raise EmptySeries("at least one time slice is required")
        try:
            mat = np.asarray(rows)
        except ValueError:
            raise DimensionMismatch("configurations have inconsistent node counts") from None
    if mat.ndim != 2 or mat.dtype == object:
        raise DimensionMismatch("configurations have inconsistent node counts")
    if mat.shape[0] == 0:
        raise EmptySeries("at least one time slice is required")
    if not np.isin(mat, (0, 1)).all():
        raise ValueError("configurations must be binary")
    return mat.astype(np.uint8, copy=False)


def edge_node_probability(configs) -> EdgeNodeProbability:
    """Fraction of slices in which each node is an edge node."""
    mat = configuration_matrix(configs)
    m = mat.shape[0]
    counts = mat.sum(axis=0, dtype=np.int64)
    p = counts / m
    p.setflags(write=False)
    return EdgeNodeProbability(p, m)


def observed_probability(config, p: EdgeNodeProbability, i: int) -> float:
    """Probability of the state node ``i`` is observed in: ``p_e`` if it is an edge node, else ``1 - p_e``."""
    bits = config.bits if isinstance(config, EdgeNodeConfiguration) else np.asarray(config)
    if not 0 <= i < p.n or i >= bits.shape[0]:
        raise IndexOutOfRange(f"node {i} outside [0, {p.n})")
    return float(p.p_e[i]) if bits[i] else float(1.0 - p.p_e[i])


def _entropy_rows(mat: np.ndarray, p_e: np.ndarray) -> np.ndarray:
    if mat.shape[1] != p_e.shape[0]:
        raise DimensionMismatch(
            f"configurations have {mat.shape[1]} nodes, probabilities {p_e.shape[0]}"
        )
    q = np.where(mat == 1, p_e, 1.0 - p_e)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(q > 0, -q * np.log(q), 0.0)
    return terms.sum(axis=1)


def slice_entropy(config, p: EdgeNodeProbability) -> float:
    """``-sum_i q_i ln q_i`` over the observed-state probabilities, with ``0 ln 0 = 0``."""
    bits = config.bits if isinstance(config, EdgeNodeConfiguration) else np.asarray(config)
    return float(_entropy_rows(np.atleast_2d(bits), p.p_e)[0])


def entropy_diagram(configs, p: Optional[EdgeNodeProbability] = None, labels=None) -> EntropyDiagram:
    """Entropy of every slice, in slice order.

    ``p`` defaults to the probability estimated from ``configs`` themselves.
    """
    if labels is None and not isinstance(configs, np.ndarray):
        configs = list(configs)
        if configs and isinstance(configs[0], EdgeNodeConfiguration):
            labels = [c.label for c in configs]
    mat = configuration_matrix(configs)
    if p is None:
        p = edge_node_probability(mat)
    if labels is None or any(lbl is None for lbl in labels):
        labels = list(range(mat.shape[0]))
    if len(labels) != mat.shape[0]:
        raise DimensionMismatch("one label per slice is required")
    ent = _entropy_rows(mat, p.p_e)
    ent.setflags(write=False)
    return EntropyDiagram(ent, tuple(labels))


def silhouette(x: np.ndarray, labels: np.ndarray) -> float:
    """Mean silhouette coefficient under Euclidean distance.

    Members of singleton clusters score 0. Defined as 0 when there is a
    single cluster.
    """
    x = np.asarray(x, dtype=float)
    labels = np.asarray(labels)
    uniq, inv = np.unique(labels, return_inverse=True)
    k = uniq.shape[0]
    if k < 2:
        return 0.0
    d = squareform(pdist(x))
    sizes = np.bincount(inv, minlength=k)
    onehot = np.zeros((x.shape[0], k))
    onehot[np.arange(x.shape[0]), inv] = 1.0
    sums = d @ onehot
    own = sizes[inv]
    a = np.where(own > 1, sums[np.arange(len(inv)), inv] / np.maximum(own - 1, 1), 0.0)
    mean_other = sums / sizes
    mean_other[np.arange(len(inv)), inv] = np.inf
    b = mean_other.min(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(own > 1, (b - a) / np.maximum(a, b), 0.0)
    s = np.nan_to_num(s, nan=0.0)
    return float(s.mean())


def _canonical_labels(labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Relabel clusters by order of first occurrence; returns (labels, old-id order)."""
    _, first = np.unique(labels, return_index=True)
    order = labels[np.sort(first)]
    remap = np.empty(labels.max() + 1, dtype=np.int64)
    remap[order] = np.arange(order.shape[0])
    return remap[labels], order


def cluster_configurations(configs, k: int, seed: int = 0) -> ClusterResult:
    """k-means (k-means++, 20 restarts, squared Euclidean) on binary configurations.

    Cluster ids are canonicalised by first occurrence along the series, so
    slice 0 is always in cluster 0.
    """
    mat = configuration_matrix(configs).astype(float)
    m = mat.shape[0]
    k = int(k)
    if k < 2 or k > m:
        raise BadK(f"k must lie in [2, {m}], got {k}")
    distinct = np.unique(mat, axis=0).shape[0]
    if distinct == 1:
        raise DegenerateData("all configurations are identical; nothing to cluster")
    if distinct < k:
        raise DegenerateData(f"only {distinct} distinct configurations for k={k}")

    km = KMeans(
        n_clusters=k,
        init="k-means++",
        n_init=KMEANS_RESTARTS,
        max_iter=KMEANS_MAX_ITER,
        random_state=seed,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        raw = km.fit_predict(mat)
    labels, order = _canonical_labels(raw)
    if np.unique(labels).shape[0] != k:
        raise DegenerateData(f"k-means left empty clusters for k={k}")
    centroids = km.cluster_centers_[order]
    labels.setflags(write=False)
    return ClusterResult(
        labels=labels,
        k=k,
        silhouette=silhouette(mat, labels),
        centroids=centroids,
        inertia=float(km.inertia_),
    )


def select_k_by_silhouette(
    configs, k_range: Iterable[int] = range(2, 11), seed: int = 0
) -> Tuple[int, ClusterResult]:
    """Cluster for every k in ``k_range`` and keep the best silhouette (smallest k on ties).

    Every k must lie in ``[2, m - 1]`` (:class:`BadK` otherwise). Values of k
    beyond the number of distinct configurations cannot form k non-empty
    clusters and are skipped.
    """
    mat = configuration_matrix(configs)
    m = mat.shape[0]
    ks = sorted(set(int(k) for k in k_range))
    if not ks or ks[0] < 2 or ks[-1] > m - 1:
        raise BadK(f"k range must lie within [2, {m - 1}] for {m} slices, got {ks}")
    distinct = np.unique(mat, axis=0).shape[0]
    if distinct == 1:
        raise DegenerateData("all configurations are identical; nothing to cluster")
    usable = [k for k in ks if k <= distinct]
    if not usable:
        raise DegenerateData(f"only {distinct} distinct configurations for k >= {ks[0]}")
    best: Optional[ClusterResult] = None
    for k in usable:
        res = cluster_configurations(mat, k, seed)
        if best is None or res.silhouette > best.silhouette:
            best = res
    return best.k, best


def enhance_signal(total, p: EdgeNodeProbability) -> np.ndarray:
    """``total / max(total) + p_e``; the normalised term is 0 when ``total`` is all zero."""
    total = np.asarray(total, dtype=float)
    p_e = p.p_e if isinstance(p, EdgeNodeProbability) else np.asarray(p, dtype=float)
    if total.shape != p_e.shape or total.ndim != 1:
        raise DimensionMismatch(f"totals {total.shape} vs probabilities {p_e.shape}")
    if (total < 0).any():
        raise ValueError("totals must be non-negative")
    peak = total.max() if total.size else 0.0
    norm = total / peak if peak > 0 else np.zeros_like(total)
    return norm + p_e
