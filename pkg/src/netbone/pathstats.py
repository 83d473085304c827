"""Shortest-path traffic counters and vertex betweenness.

One canonical shortest path is charged per ordered reachable pair (s, t):
walking back from t, each step takes the smallest-index predecessor one BFS
level closer to s. For a fixed source those paths form a tree, so all
counters accumulate from subtree sizes in O(|V| + |E|) per source.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numba import njit

from .graph import Graph

log = logging.getLogger(__name__)

BRUTE_FORCE_MAX_VERTICES = 12


@dataclass
class PathStats:
    """Integer traffic counters over the canonical shortest-path set.

    Arc-pair counts are stored as dense per-vertex tables packed in one flat
    array: the table for vertex u occupies ``seg[seg_offset[u]:]`` with shape
    (deg(u), deg(u)); rows index incoming arcs by tail position, columns
    index outgoing arcs by head position in the adjacency of u.
    """

    total_paths: int
    n_arc: np.ndarray      # traversal count per arc
    n_start: np.ndarray    # per arc, paths whose first arc it is
    m_arc: np.ndarray      # per arc e', sum over continuations of pair counts
    seg: np.ndarray        # packed per-vertex (incoming, outgoing) pair counts
    seg_offset: np.ndarray
    m_vertex: np.ndarray   # per vertex, sum of outgoing-arc traversal counts

    def seg_table(self, g: Graph, u: int) -> np.ndarray:
        """Dense (deg(u), deg(u)) table of pair counts through vertex u."""
        d = g.degree(u)
        return self.seg[self.seg_offset[u]:self.seg_offset[u] + d * d].reshape(d, d)

    def seg_count(self, g: Graph, a_in: int, a_out: int) -> int:
        """Count for consecutive arcs a_in = (w -> u), a_out = (u -> v)."""
        u = int(g.nbrs[a_in])
        if int(g.arc_tail[a_out]) != u:
            raise ValueError("arcs do not share a mid vertex")
        d = g.degree(u)
        in_pos = int(g.rev[a_in]) - int(g.indptr[u])
        out_pos = a_out - int(g.indptr[u])
        return int(self.seg[self.seg_offset[u] + in_pos * d + out_pos])


@njit(cache=True)
def _accumulate(indptr, nbrs, seg_offset, n_arc, n_start, m_arc, seg):
    n = len(indptr) - 1
    dist = np.empty(n, dtype=np.int32)
    order = np.empty(n, dtype=np.int32)
    parent = np.empty(n, dtype=np.int32)
    size = np.empty(n, dtype=np.int64)
    total = 0
    for s in range(n):
        dist[:] = -1
        dist[s] = 0
        order[0] = s
        head = 0
        tail = 1
        while head < tail:
            u = order[head]
            head += 1
            for i in range(indptr[u], indptr[u + 1]):
                v = nbrs[i]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    order[tail] = v
                    tail += 1
        reached = tail
        total += reached - 1
        # smallest-index predecessor: adjacency is ascending, take the first
        # neighbor one level closer
        for k in range(1, reached):
            v = order[k]
            for i in range(indptr[v], indptr[v + 1]):
                w = nbrs[i]
                if dist[w] == dist[v] - 1:
                    parent[v] = w
                    break
        # subtree sizes over the canonical tree (deepest levels first)
        for k in range(reached):
            size[order[k]] = 1
        for k in range(reached - 1, 0, -1):
            v = order[k]
            size[parent[v]] += size[v]
        for k in range(1, reached):
            v = order[k]
            p = parent[v]
            # arc id (p -> v) by binary search in p's adjacency
            lo = indptr[p]
            hi = indptr[p + 1]
            while lo < hi:
                mid = (lo + hi) // 2
                if nbrs[mid] < v:
                    lo = mid + 1
                else:
                    hi = mid
            a1 = lo
            n_arc[a1] += size[v]
            if p == s:
                n_start[a1] += size[v]
            else:
                gp = parent[p]
                lo = indptr[gp]
                hi = indptr[gp + 1]
                while lo < hi:
                    mid = (lo + hi) // 2
                    if nbrs[mid] < p:
                        lo = mid + 1
                    else:
                        hi = mid
                a0 = lo
                m_arc[a0] += size[v]
                # position of gp among p's neighbors
                lo = indptr[p]
                hi = indptr[p + 1]
                while lo < hi:
                    mid = (lo + hi) // 2
                    if nbrs[mid] < gp:
                        lo = mid + 1
                    else:
                        hi = mid
                in_pos = lo - indptr[p]
                out_pos = a1 - indptr[p]
                deg = indptr[p + 1] - indptr[p]
                seg[seg_offset[p] + in_pos * deg + out_pos] += size[v]
    return total


def _seg_offsets(g: Graph) -> np.ndarray:
    degs = np.diff(g.indptr).astype(np.int64)
    off = np.zeros(g.vertex_count + 1, dtype=np.int64)
    np.cumsum(degs * degs, out=off[1:])
    return off


def canonical_paths_stats(g: Graph) -> PathStats:
    """Accumulate all counters over the canonical shortest-path set."""
    if g.vertex_count == 0:
        raise ValueError("graph is empty")
    seg_offset = _seg_offsets(g)
    n_arc = np.zeros(g.num_arcs, dtype=np.int64)
    n_start = np.zeros(g.num_arcs, dtype=np.int64)
    m_arc = np.zeros(g.num_arcs, dtype=np.int64)
    seg = np.zeros(int(seg_offset[-1]), dtype=np.int64)
    total = _accumulate(g.indptr, g.nbrs, seg_offset, n_arc, n_start, m_arc, seg)
    n = g.vertex_count
    if total < n * (n - 1):
        log.warning(
            "graph is disconnected: %d of %d ordered pairs have paths",
            total, n * (n - 1),
        )
    m_vertex = np.zeros(n, dtype=np.int64)
    np.add.at(m_vertex, g.arc_tail, n_arc)
    return PathStats(
        total_paths=int(total), n_arc=n_arc, n_start=n_start, m_arc=m_arc,
        seg=seg, seg_offset=seg_offset, m_vertex=m_vertex,
    )


def _canonical_path(g: Graph, s: int, t: int) -> list[int] | None:
    """Oracle-side canonical path: enumerate simple paths, keep the shortest,
    break ties by lexicographically smallest reversed vertex sequence."""
    best: tuple | None = None
    stack = [(s, (s,))]
    while stack:
        u, path = stack.pop()
        if u == t:
            key = (len(path), tuple(reversed(path)))
            if best is None or key < best:
                best = key
            continue
        if best is not None and len(path) >= best[0]:
            continue
        for v in g.neighbors(u):
            v = int(v)
            if v not in path:
                stack.append((v, path + (v,)))
    if best is None:
        return None
    return list(reversed(best[1]))


def brute_force_stats(g: Graph) -> PathStats:
    """Test oracle: same contract as canonical_paths_stats by explicit
    per-pair path enumeration. Guarded to tiny graphs."""
    n = g.vertex_count
    if n == 0:
        raise ValueError("graph is empty")
    if n > BRUTE_FORCE_MAX_VERTICES:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX_VERTICES} vertices")
    seg_offset = _seg_offsets(g)
    n_arc = np.zeros(g.num_arcs, dtype=np.int64)
    n_start = np.zeros(g.num_arcs, dtype=np.int64)
    m_arc = np.zeros(g.num_arcs, dtype=np.int64)
    seg = np.zeros(int(seg_offset[-1]), dtype=np.int64)
    total = 0
    for s in range(n):
        for t in range(n):
            if s == t:
                continue
            path = _canonical_path(g, s, t)
            if path is None:
                continue
            total += 1
            arcs = [g.arc_id(path[i], path[i + 1]) for i in range(len(path) - 1)]
            n_start[arcs[0]] += 1
            for a in arcs:
                n_arc[a] += 1
            for a0, a1 in zip(arcs, arcs[1:]):
                mid = int(g.nbrs[a0])
                d = g.degree(mid)
                in_pos = int(g.rev[a0]) - int(g.indptr[mid])
                out_pos = a1 - int(g.indptr[mid])
                seg[seg_offset[mid] + in_pos * d + out_pos] += 1
                m_arc[a0] += 1
    m_vertex = np.zeros(n, dtype=np.int64)
    np.add.at(m_vertex, g.arc_tail, n_arc)
    return PathStats(
        total_paths=total, n_arc=n_arc, n_start=n_start, m_arc=m_arc,
        seg=seg, seg_offset=seg_offset, m_vertex=m_vertex,
    )


def vertex_betweenness(g: Graph) -> np.ndarray:
    """Brandes betweenness over unweighted shortest paths, counted over
    ordered pairs with endpoints excluded."""
    n = g.vertex_count
    if n == 0:
        raise ValueError("graph is empty")
    bc = np.zeros(n, dtype=np.float64)
    for s in range(n):
        dist = [-1] * n
        sigma = [0.0] * n
        preds: list[list[int]] = [[] for _ in range(n)]
        dist[s] = 0
        sigma[s] = 1.0
        order = [s]
        head = 0
        while head < len(order):
            u = order[head]
            head += 1
            for v in g.neighbors(u):
                v = int(v)
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    order.append(v)
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
                    preds[v].append(u)
        delta = [0.0] * n
        for v in reversed(order[1:]):
            coeff = (1.0 + delta[v]) / sigma[v]
            for u in preds[v]:
                delta[u] += sigma[u] * coeff
            bc[v] += delta[v]
    # each unordered pair contributes from both endpoints as source
    return bc


def dump_counters(g: Graph, stats: PathStats) -> str:
    """Debug dump: 'ARC u v N Nstart M' per arc and 'SEG u v w count' per
    nonzero consecutive-arc pair, in stable index order."""
    lines = []
    for a in range(g.num_arcs):
        u = int(g.arc_tail[a])
        v = int(g.nbrs[a])
        lines.append(
            f"ARC {u} {v} {int(stats.n_arc[a])} {int(stats.n_start[a])} "
            f"{int(stats.m_arc[a])}"
        )
    for v in range(g.vertex_count):
        d = g.degree(v)
        table = stats.seg_table(g, v)
        nb = g.neighbors(v)
        for i in range(d):
            for j in range(d):
                c = int(table[i, j])
                if c:
                    lines.append(f"SEG {int(nb[i])} {v} {int(nb[j])} {c}")
    return "\n".join(lines) + "\n"
