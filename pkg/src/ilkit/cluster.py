"""Agglomerative average-linkage clustering over a similarity matrix.

Distances are 1 - similarity. Ties at each merge step break toward the pair
whose clusters contain the lowest original leaf indices, which pins down a
deterministic merge tree and dendrogram leaf order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IlkitError


@dataclass(frozen=True)
class Merge:
    left: int      # cluster id (leaves are 0..n-1, merges get n, n+1, ...)
    right: int
    distance: float
    size: int


@dataclass(frozen=True)
class ClusterResult:
    merges: tuple[Merge, ...]
    leaf_order: tuple[int, ...]


def hierarchical_cluster(matrix: np.ndarray) -> ClusterResult:
    """Cluster items given a symmetric similarity matrix with entries in [0,1]."""
    sim = np.asarray(matrix, dtype=float)
    if sim.ndim != 2 or sim.shape[0] != sim.shape[1]:
        raise IlkitError("similarity matrix must be square")
    if not np.allclose(sim, sim.T, atol=1e-12):
        raise IlkitError("similarity matrix must be symmetric")
    if sim.size and (sim.min() < -1e-12 or sim.max() > 1 + 1e-12):
        raise IlkitError("similarity entries must lie in [0, 1]")
    n = sim.shape[0]
    if n == 0:
        return ClusterResult((), ())
    if n == 1:
        return ClusterResult((), (0,))

    dist = {}
    for i in range(n):
        for j in range(i + 1, n):
            dist[(i, j)] = 1.0 - sim[i, j]

    # id -> (size, min original leaf); distances updated with Lance-Williams
    # average-linkage weights.
    active: dict[int, tuple[int, int]] = {i: (1, i) for i in range(n)}
    children: dict[int, tuple[int, int]] = {}
    merges: list[Merge] = []
    next_id = n

    def pair_key(i: int, j: int) -> tuple[int, int]:
        return (i, j) if i < j else (j, i)

    while len(active) > 1:
        best = None
        for i in sorted(active):
            for j in sorted(active):
                if j <= i:
                    continue
                d = dist[pair_key(i, j)]
                key = (d, min(active[i][1], active[j][1]), max(active[i][1], active[j][1]))
                if best is None or key < best[0]:
                    best = (key, i, j)
        _key, i, j = best
        d_ij = dist[pair_key(i, j)]
        size_i, min_i = active[i]
        size_j, min_j = active[j]
        new_size = size_i + size_j
        merges.append(Merge(i, j, d_ij, new_size))
        children[next_id] = (i, j)
        for k in [x for x in active if x not in (i, j)]:
            d_new = (
                size_i * dist[pair_key(i, k)] + size_j * dist[pair_key(j, k)]
            ) / new_size
            dist[pair_key(next_id, k)] = d_new
        del active[i], active[j]
        active[next_id] = (new_size, min(min_i, min_j))
        next_id += 1

    def leaves(cid: int) -> list[int]:
        if cid < n:
            return [cid]
        left, right = children[cid]
        left_leaves = leaves(left)
        right_leaves = leaves(right)
        if min(left_leaves) <= min(right_leaves):
            return left_leaves + right_leaves
        return right_leaves + left_leaves

    root = next_id - 1
    return ClusterResult(tuple(merges), tuple(leaves(root)))
