"""1-D k-means over saliency values and rank-ordered label rasters.

Lloyd iterations start from deterministic quantile seeds so that results
are reproducible across runs and worker counts.  Because optimal 1-D
clusterings are contiguous in sorted order, small inputs additionally get
an exact dynamic-programming polish: if Lloyd converged to a local
optimum, the DP's globally optimal partition replaces it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

# Above this many values the O(k n^2) DP polish is skipped and the Lloyd
# fixed point is returned as-is.
DP_POLISH_LIMIT = 2048


@dataclass(frozen=True)
class ClusterModel:
    """Converged clustering of scalar values.

    ``centroids`` are in ascending order and ``assignments`` index into
    them.  ``degenerate`` flags inputs with fewer distinct values than the
    requested k (the effective k is then the distinct count).
    """

    centroids: np.ndarray
    assignments: np.ndarray
    wcss: float
    iterations: int
    converged: bool
    degenerate: bool = False
    wcss_history: tuple[float, ...] = ()

    @property
    def cluster_count(self) -> int:
        return len(self.centroids)


@dataclass(frozen=True)
class LabelRaster:
    """Per-pixel cluster ranks, 1 = least salient .. N = most salient."""

    labels: np.ndarray
    cluster_count: int
    degenerate: bool = False


def _wcss(values: np.ndarray, centroids: np.ndarray, assignments: np.ndarray) -> float:
    return float(np.sum((values - centroids[assignments]) ** 2))


def _optimal_contiguous_partition(
    sorted_values: np.ndarray, k: int
) -> tuple[np.ndarray, float]:
    """Exact 1-D k-means by DP over contiguous segments of sorted values.

    Returns per-sorted-position cluster indices and the optimal WCSS.
    """
    n = len(sorted_values)
    s1 = np.concatenate([[0.0], np.cumsum(sorted_values)])
    s2 = np.concatenate([[0.0], np.cumsum(sorted_values**2)])

    def seg_cost(j: np.ndarray, i: int) -> np.ndarray:
        # cost of one cluster covering sorted positions j..i inclusive
        m = i - j + 1
        tot = s1[i + 1] - s1[j]
        return (s2[i + 1] - s2[j]) - tot * tot / m

    i_all = np.arange(n)
    best = s2[1:] - s1[1:] ** 2 / (i_all + 1)  # best[i]: 1 cluster over 0..i
    split = np.zeros((k, n), dtype=np.int64)
    for c in range(1, k):
        nxt = np.empty(n)
        for i in range(n):
            j = np.arange(c, i + 1)
            if len(j) == 0:
                nxt[i] = np.inf
                continue
            cand = best[j - 1] + seg_cost(j, i)
            a = int(np.argmin(cand))
            nxt[i] = cand[a]
            split[c, i] = j[a]
        best = nxt

    labels = np.empty(n, dtype=np.int64)
    hi = n - 1
    for c in range(k - 1, 0, -1):
        lo = split[c, hi]
        labels[lo : hi + 1] = c
        hi = lo - 1
    labels[: hi + 1] = 0
    return labels, float(best[n - 1])


def kmeans_1d(
    values,
    k: int,
    max_iter: int = 100,
    tol: float = 1e-6,
    seed: int = 0,
) -> ClusterModel:
    """Cluster scalar values into k groups minimizing within-cluster variance.

    Deterministic: quantile initialization, stable tie-breaking, and (for
    small inputs) a DP polish to the global optimum.  The seed parameter
    is accepted for interface stability but unused.
    """
    del seed
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        raise InvalidInputError("cannot cluster an empty value list")
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    if max_iter < 1:
        raise InvalidInputError("max_iter must be >= 1")
    if tol < 0:
        raise InvalidInputError("tol must be >= 0")

    distinct = np.unique(values)
    degenerate = len(distinct) < k
    k_eff = min(k, len(distinct))

    centroids = np.quantile(values, (np.arange(k_eff) + 0.5) / k_eff)
    assignments = np.zeros(values.size, dtype=np.int64)
    history: list[float] = []
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        dist = (values[:, None] - centroids[None, :]) ** 2
        assignments = np.argmin(dist, axis=1)

        # Relocate empty clusters onto the currently worst-fit value.
        for i in range(k_eff):
            if not np.any(assignments == i):
                worst = int(np.argmax(dist[np.arange(values.size), assignments]))
                centroids[i] = values[worst]
                dist[:, i] = (values - centroids[i]) ** 2
                assignments = np.argmin(dist, axis=1)

        new_centroids = np.array(
            [values[assignments == i].mean() for i in range(k_eff)]
        )
        history.append(_wcss(values, new_centroids, assignments))
        movement = float(np.max(np.abs(new_centroids - centroids)))
        centroids = new_centroids
        if movement < tol:
            converged = True
            break

    if values.size <= DP_POLISH_LIMIT and k_eff > 1:
        order = np.argsort(values, kind="stable")
        opt_sorted_labels, opt_wcss = _optimal_contiguous_partition(
            values[order], k_eff
        )
        if opt_wcss < history[-1] - 1e-12:
            assignments = np.empty(values.size, dtype=np.int64)
            assignments[order] = opt_sorted_labels
            centroids = np.array(
                [values[assignments == i].mean() for i in range(k_eff)]
            )
            converged = True
            history.append(opt_wcss)

    # Present centroids in ascending order with assignments remapped.
    order = np.argsort(centroids, kind="stable")
    remap = np.empty(k_eff, dtype=np.int64)
    remap[order] = np.arange(k_eff)
    centroids = centroids[order]
    assignments = remap[assignments]

    return ClusterModel(
        centroids=centroids,
        assignments=assignments,
        wcss=_wcss(values, centroids, assignments),
        iterations=iterations,
        converged=converged,
        degenerate=degenerate,
        wcss_history=tuple(history),
    )


def rank_labels(model: ClusterModel, map_dims: tuple[int, int]) -> LabelRaster:
    """Map cluster assignments to saliency ranks and shape them as a raster."""
    h, w = map_dims
    if model.assignments.size != h * w:
        raise InvalidInputError(
            f"{model.assignments.size} assignments cannot fill a {h}x{w} raster"
        )
    order = np.argsort(model.centroids, kind="stable")
    rank = np.empty(len(model.centroids), dtype=np.int64)
    rank[order] = np.arange(1, len(model.centroids) + 1)
    labels = rank[model.assignments].reshape(h, w)
    return LabelRaster(
        labels=labels,
        cluster_count=len(model.centroids),
        degenerate=model.degenerate,
    )
