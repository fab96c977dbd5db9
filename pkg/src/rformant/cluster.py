"""UPGMA clustering of utterance profiles and Newick serialization.

Average pair group linkage: the distance between two clusters is the
arithmetic mean of all their cross-cluster leaf distances, maintained
incrementally by size-weighted averaging. Merge heights never decrease,
so the tree is ultrametric and can be drawn with all leaves at height 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stats import DistanceMatrix

_NEWICK_UNSAFE = set("(),:;'\"\t\n ")


@dataclass(frozen=True)
class Dendrogram:
    """Result of agglomerative clustering over labeled leaves.

    ``merges`` names nodes by concatenated leaf labels for readability;
    ``links`` carries the same merges with integer node ids (leaves are
    0..m-1 in label order, merge k creates node m+k).
    """

    labels: tuple[str, ...]
    merges: tuple[tuple[str, str, float, int], ...]
    links: tuple[tuple[int, int, float, int], ...]

    def __post_init__(self):
        m = len(self.labels)
        if len(self.merges) != m - 1 or len(self.links) != m - 1:
            raise ValueError(f"expected {m - 1} merges for {m} leaves")
        dists = [d for _, _, d, _ in self.merges]
        for a, b in zip(dists, dists[1:]):
            if b < a - 1e-9:
                raise ValueError("merge distances must be nondecreasing")
        if self.merges and self.merges[-1][3] != m:
            raise ValueError("final merge must contain every leaf")


def upgma(d: DistanceMatrix) -> Dendrogram:
    """Cluster by repeatedly merging the closest pair under average linkage.

    Distance from a merged cluster AB to any C is the size-weighted mean
    (|A| d(A,C) + |B| d(B,C)) / (|A|+|B|). Equal minima resolve to the
    lexicographically smallest index pair in the current cluster ordering;
    the merged cluster takes the smaller index's position.
    """
    labels = d.labels
    m = len(labels)
    cur = d.values.copy()
    names = list(labels)
    sizes = [1] * m
    ids = list(range(m))
    merges: list[tuple[str, str, float, int]] = []
    links: list[tuple[int, int, float, int]] = []
    next_id = m

    while len(names) > 1:
        k = len(names)
        best_i, best_j, best_d = 0, 1, np.inf
        for i in range(k):
            for j in range(i + 1, k):
                if cur[i, j] < best_d:
                    best_i, best_j, best_d = i, j, cur[i, j]
        i, j = best_i, best_j
        size = sizes[i] + sizes[j]
        merges.append((names[i], names[j], float(best_d), size))
        links.append((ids[i], ids[j], float(best_d), size))

        merged_row = (sizes[i] * cur[i, :] + sizes[j] * cur[j, :]) / size
        cur[i, :] = merged_row
        cur[:, i] = merged_row
        cur[i, i] = 0.0
        cur = np.delete(np.delete(cur, j, axis=0), j, axis=1)

        names[i] = names[i] + names[j]
        sizes[i] = size
        ids[i] = next_id
        del names[j], sizes[j], ids[j]
        next_id += 1

    return Dendrogram(labels=labels, merges=tuple(merges), links=tuple(links))


def to_newick(t: Dendrogram) -> str:
    """Serialize as Newick with ultrametric branch lengths.

    A node merged at distance D sits at height D/2; each branch length is
    the height difference to the parent, so leaf-to-leaf path lengths
    reproduce the merge distances.
    """
    for label in t.labels:
        if not label or set(label) & _NEWICK_UNSAFE:
            raise ValueError(f"label {label!r} cannot be written as Newick")
    m = len(t.labels)
    height = {nid: 0.0 for nid in range(m)}
    children = {}
    for idx, (li, ri, dist, _) in enumerate(t.links):
        nid = m + idx
        height[nid] = dist / 2.0
        children[nid] = (li, ri)

    def render(nid: int, parent_height: float) -> str:
        branch = format(float(parent_height - height[nid]), ".12g")
        if nid < m:
            return f"{t.labels[nid]}:{branch}"
        li, ri = children[nid]
        h = height[nid]
        return f"({render(li, h)},{render(ri, h)}):{branch}"

    root = m + len(t.links) - 1
    li, ri = children[root]
    h = height[root]
    return f"({render(li, h)},{render(ri, h)});"


def cophenetic_matrix(t: Dendrogram) -> DistanceMatrix:
    """Leaf-pair distances implied by the tree: the height pairs join at."""
    m = len(t.labels)
    members = {nid: [nid] for nid in range(m)}
    coph = np.zeros((m, m))
    for idx, (li, ri, dist, _) in enumerate(t.links):
        left, right = members.pop(li), members.pop(ri)
        for a in left:
            for b in right:
                coph[a, b] = coph[b, a] = dist
        members[m + idx] = left + right
    return DistanceMatrix(t.labels, coph)
