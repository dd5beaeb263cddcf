"""Evolving random multigraph coupled to the transposition walk.

Every non-trivial transposition (i j) of the walk contributes the edge {i, j}
to a multigraph on the same label set.  Only component-level facts are ever
needed, so the graph is a union-find forest with per-root vertex and edge
tallies; no adjacency is stored and edges are never deleted.  A component
with e = v - 1 is a tree, e = v unicyclic, e > v complex.

The same tallies drive static Erdos-Renyi snapshots: bernoulli_snapshot
samples G(n, p) at the time-equivalent edge probability, and a compiled
census routine handles the large replicated experiments.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numba
import numpy as np


class ComponentClass(enum.Enum):
    TREE = "tree"
    UNICYCLIC = "unicyclic"
    COMPLEX = "complex"


@dataclass(frozen=True)
class ComponentCensus:
    component_count: int
    giant_size: int
    tree_counts: dict[int, int]


def classify(v: int, e: int) -> ComponentClass:
    if e == v - 1:
        return ComponentClass.TREE
    if e == v:
        return ComponentClass.UNICYCLIC
    return ComponentClass.COMPLEX


class EvolvingMultigraph:
    """Union-find multigraph on vertices 1..n with component tallies.

    Components also carry a boolean mark that survives merges (OR); the walk
    uses it to tag components whose cycles have fragmented, which is what the
    tree <-> never-fragmented correspondence test needs.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"need n >= 1, got {n}")
        self.n = n
        self._parent = np.arange(n + 1, dtype=np.int64)
        self._v = np.ones(n + 1, dtype=np.int64)
        self._e = np.zeros(n + 1, dtype=np.int64)
        self._mark = np.zeros(n + 1, dtype=bool)
        self.component_count = n
        self.edge_total = 0

    def find(self, i: int) -> int:
        p = self._parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = int(p[i])
        return i

    def add_edge(self, i: int, j: int) -> bool:
        """Add one (multi)edge; returns True when two components merged.

        Self-loops are allowed: they add to the edge tally and never merge.
        """
        self._check(i)
        self._check(j)
        self.edge_total += 1
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            self._e[ri] += 1
            return False
        if self._v[ri] < self._v[rj]:
            ri, rj = rj, ri
        self._parent[rj] = ri
        self._v[ri] += self._v[rj]
        self._e[ri] += self._e[rj] + 1
        self._mark[ri] |= self._mark[rj]
        self.component_count -= 1
        return True

    def mark_component(self, i: int) -> None:
        self._mark[self.find(i)] = True

    def component_marked(self, i: int) -> bool:
        return bool(self._mark[self.find(i)])

    def component_of(self, i: int) -> tuple[int, int, int]:
        """(root, vertex count, edge count) of i's component."""
        r = self.find(i)
        return r, int(self._v[r]), int(self._e[r])

    def class_of(self, i: int) -> ComponentClass:
        _, v, e = self.component_of(i)
        return classify(v, e)

    def component_size_of(self, i: int) -> int:
        return int(self._v[self.find(i)])

    def roots(self) -> np.ndarray:
        idx = np.arange(1, self.n + 1)
        return idx[self._parent[1:] == idx]

    def component_counts(self) -> ComponentCensus:
        """Linear sweep over roots: component count, giant size, tree counts."""
        tree: dict[int, int] = {}
        giant = 0
        count = 0
        for r in self.roots():
            v, e = int(self._v[r]), int(self._e[r])
            count += 1
            giant = max(giant, v)
            if e == v - 1:
                tree[v] = tree.get(v, 0) + 1
        assert count == self.component_count
        return ComponentCensus(count, giant, tree)

    def _check(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise ValueError(f"vertex {i} outside 1..{self.n}")

    def __repr__(self) -> str:
        return (
            f"EvolvingMultigraph(n={self.n}, components={self.component_count}, "
            f"edges={self.edge_total})"
        )


def time_to_edge_probability(n: int, t: float) -> float:
    """Edge probability matched to continuous walk time t: 1 - exp(-2t/n^2).

    At t = c*n/2 this is 1 - exp(-c/n), the coupling-equivalent G(n,p)."""
    if t < 0:
        raise ValueError(f"need t >= 0, got {t}")
    return -math.expm1(-2.0 * t / (n * n))


def sample_gnp_edges(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform sample of a G(n,p) edge set as an (m, 2) array of 1-based pairs.

    Draws Binomial(C(n,2), p) for the edge count, then that many distinct
    pairs by rejection, which is exact and fast in the sparse regime used
    here.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"need 0 <= p <= 1, got {p}")
    total = n * (n - 1) // 2
    m = int(rng.binomial(total, p))
    if m == 0:
        return np.empty((0, 2), dtype=np.int64)
    if m > total // 2:
        # dense fallback: enumerate and subsample without replacement
        iu = np.triu_indices(n, k=1)
        pick = rng.choice(total, size=m, replace=False)
        return np.stack([iu[0][pick] + 1, iu[1][pick] + 1], axis=1).astype(np.int64)
    codes = np.empty(0, dtype=np.int64)
    while len(codes) < m:
        need = m - len(codes)
        a = rng.integers(0, n, size=2 * (need + 8), dtype=np.int64)
        i, j = a[::2], a[1::2]
        keep = i < j
        fresh = i[keep] * n + j[keep]
        codes = np.unique(np.concatenate([codes, fresh]))
    codes = rng.permutation(codes)[:m]
    return np.stack([codes // n + 1, codes % n + 1], axis=1)


def bernoulli_snapshot(n: int, t: float, rng: np.random.Generator) -> EvolvingMultigraph:
    """Independent G(n, p) sample with p matched to walk time t."""
    g = EvolvingMultigraph(n)
    for i, j in sample_gnp_edges(n, time_to_edge_probability(n, t), rng):
        g.add_edge(int(i), int(j))
    return g


@numba.njit(cache=True, nogil=True)
def static_component_stats(n, edges, kmax):
    """Component stats of a simple graph given by an (m, 2) edge array.

    Returns (component_count, giant_size, size_of_component_of_1,
    tree_counts[0..kmax]) where tree_counts[k] is the number of tree
    components on k vertices.
    """
    parent = np.arange(n + 1)
    vcnt = np.ones(n + 1, dtype=np.int64)
    ecnt = np.zeros(n + 1, dtype=np.int64)
    comp = n
    for idx in range(edges.shape[0]):
        i = edges[idx, 0]
        j = edges[idx, 1]
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        while parent[j] != j:
            parent[j] = parent[parent[j]]
            j = parent[j]
        if i == j:
            ecnt[i] += 1
        else:
            if vcnt[i] < vcnt[j]:
                i, j = j, i
            parent[j] = i
            vcnt[i] += vcnt[j]
            ecnt[i] += ecnt[j] + 1
            comp -= 1
    tree_counts = np.zeros(kmax + 1, dtype=np.int64)
    giant = 0
    for r in range(1, n + 1):
        if parent[r] != r:
            continue
        v = vcnt[r]
        if v > giant:
            giant = v
        if ecnt[r] == v - 1 and v <= kmax:
            tree_counts[v] += 1
    r1 = 1
    while parent[r1] != r1:
        r1 = parent[r1]
    return comp, giant, vcnt[r1], tree_counts
