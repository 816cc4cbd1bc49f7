"""Discrete connectivity of dilated sample sets via a neighborhood graph.

Two active samples are joined when their distance is at most sigma + tau
(the edge rule used throughout; a stricter geometric 2*sigma + tau variant
is available behind ``edge_rule="geometric"``).  Components are computed with
union-find over neighbor pairs; a breadth-first search over the explicit
adjacency matrix serves as the independent oracle.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from kdecluster.kernels import EUCLIDEAN, SUPREMUM, norm_of

EDGE_RULES = ("paper", "geometric")


@dataclass(frozen=True)
class ComponentPartition:
    """Partition of the active indices into connected components.

    Component ids run 0..count-1, ordered by smallest member index; member
    lists are sorted.
    """

    labels: dict
    count: int
    member_lists: tuple

    def component_of(self, index: int) -> int:
        return self.labels[index]


class UnionFind:
    """Array-backed union-find with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


def _canonical(active: np.ndarray, groups: dict) -> ComponentPartition:
    """Canonicalize root -> member positions into the partition structure."""
    members = [sorted(active[list(pos)]) for pos in groups.values()]
    members.sort(key=lambda m: m[0])
    labels = {}
    for cid, comp in enumerate(members):
        for idx in comp:
            labels[int(idx)] = cid
    return ComponentPartition(
        labels=labels,
        count=len(members),
        member_lists=tuple(tuple(int(i) for i in comp) for comp in members),
    )


def edge_threshold(sigma: float, tau: float, edge_rule: str = "paper") -> float:
    if edge_rule == "paper":
        return sigma + tau
    if edge_rule == "geometric":
        return 2.0 * sigma + tau
    raise ValueError(f"unknown edge rule {edge_rule!r}")


def tau_components(
    points: np.ndarray,
    active_indices,
    sigma: float,
    tau: float,
    norm: str = EUCLIDEAN,
    edge_rule: str = "paper",
) -> ComponentPartition:
    """tau-connected components of the active samples under the edge rule."""
    if sigma <= 0 or tau <= 0:
        raise ValueError("sigma and tau must be positive")
    threshold = edge_threshold(sigma, tau, edge_rule)
    return components_at_threshold(points, active_indices, threshold, norm)


def components_at_threshold(
    points: np.ndarray, active_indices, threshold: float, norm: str = EUCLIDEAN
) -> ComponentPartition:
    """Union-find components of the graph with edges at distance <= threshold."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    active = np.asarray(sorted(int(i) for i in active_indices), dtype=np.intp)
    m = active.shape[0]
    if m == 0:
        return ComponentPartition(labels={}, count=0, member_lists=())
    sub = points[active]

    if points.shape[1] == 1:
        # Sorted-gap rule: in one dimension connectivity breaks exactly at
        # consecutive gaps above the threshold.
        order = np.argsort(sub[:, 0], kind="stable")
        gaps = np.diff(sub[order, 0])
        breaks = np.flatnonzero(gaps > threshold)
        groups = {}
        start = 0
        for b in list(breaks) + [m - 1]:
            groups[start] = order[start : b + 1].tolist()
            start = b + 1
        return _canonical(active, groups)

    uf = UnionFind(m)
    p = 2.0 if norm == EUCLIDEAN else np.inf
    pairs = cKDTree(sub).query_pairs(threshold, p=p, output_type="ndarray")
    for a, b in pairs:
        uf.union(int(a), int(b))
    groups: dict = {}
    for i in range(m):
        groups.setdefault(uf.find(i), []).append(i)
    return _canonical(active, groups)


def components_bruteforce(
    points: np.ndarray, active_indices, threshold: float, norm: str = EUCLIDEAN
) -> ComponentPartition:
    """BFS over the explicit adjacency matrix; oracle for the fast path."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    active = np.asarray(sorted(int(i) for i in active_indices), dtype=np.intp)
    m = active.shape[0]
    if m == 0:
        return ComponentPartition(labels={}, count=0, member_lists=())
    sub = points[active]
    diffs = sub[:, None, :] - sub[None, :, :]
    adj = norm_of(diffs, norm) <= threshold
    seen = np.zeros(m, dtype=bool)
    groups = {}
    for start in range(m):
        if seen[start]:
            continue
        comp = []
        queue = deque([start])
        seen[start] = True
        while queue:
            i = queue.popleft()
            comp.append(i)
            for j in np.flatnonzero(adj[i] & ~seen):
                seen[j] = True
                queue.append(int(j))
        groups[start] = comp
    return _canonical(active, groups)
