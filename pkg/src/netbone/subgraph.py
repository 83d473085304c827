"""Connected-subgraph optimization.

Holds the greedy maximum-weight connected subgraph heuristic, a Steiner tree
2-approximation via the metric closure, and exhaustive oracles used by the
test suite on tiny instances.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

import numpy as np

from .graph import Graph, is_connected
from .models import Backbone, loglik_bimodal
from .pathstats import PathStats

EXACT_MCG_MAX_VERTICES = 14
EXACT_BACKBONE_MAX_VERTICES = 8
EXACT_BACKBONE_MAX_K = 5


@dataclass
class WeightedVertexGraph:
    graph: Graph
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if len(self.weights) != self.graph.vertex_count:
            raise ValueError("one weight per vertex required")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")


def _component_sizes(g: Graph) -> np.ndarray:
    comp = np.full(g.vertex_count, -1, dtype=np.int64)
    c = 0
    for s in range(g.vertex_count):
        if comp[s] >= 0:
            continue
        stack = [s]
        comp[s] = c
        while stack:
            u = stack.pop()
            for v in g.neighbors(u):
                v = int(v)
                if comp[v] < 0:
                    comp[v] = c
                    stack.append(v)
        c += 1
    sizes = np.bincount(comp, minlength=c)
    return sizes[comp]


def mcg_heuristic(wg: WeightedVertexGraph, k: int, seeds_to_try: int | None = None):
    """Greedy seed-and-grow search for a heavy connected k-vertex set.

    Seeds are the highest-weight vertices (ties toward smaller index); each
    seed grows by repeatedly absorbing the heaviest adjacent vertex. The best
    grown set wins, ties broken by lexicographic vertex order.
    """
    g = wg.graph
    n = g.vertex_count
    if k < 1 or k > n:
        raise ValueError(f"k={k} out of range for {n} vertices")
    comp_size = _component_sizes(g)
    if not np.any(comp_size >= k):
        raise ValueError(f"no connected component has {k} vertices")
    if seeds_to_try is None:
        seeds_to_try = min(n, 2 * k)
    ranked = sorted(range(n), key=lambda v: (-wg.weights[v], v))
    best: tuple | None = None
    tried = 0
    for seed in ranked:
        if tried >= seeds_to_try:
            break
        tried += 1
        if comp_size[seed] < k:
            continue
        chosen = {seed}
        heap = [(-wg.weights[int(v)], int(v)) for v in g.neighbors(seed)]
        heapq.heapify(heap)
        while len(chosen) < k:
            add = heapq.heappop(heap)[1]
            if add in chosen:
                continue
            chosen.add(add)
            for v in g.neighbors(add):
                v = int(v)
                if v not in chosen:
                    heapq.heappush(heap, (-wg.weights[v], v))
        key = (-float(wg.weights[list(chosen)].sum()), tuple(sorted(chosen)))
        if best is None or key < best:
            best = key
    if best is None:
        raise ValueError(f"no tried seed lies in a component of size >= {k}")
    return set(best[1])


def _connected_ksets(g: Graph, k: int):
    """All connected k-vertex sets, each yielded once, in a deterministic
    order (grow-with-exclusion from each root)."""
    n = g.vertex_count
    for root in range(n):
        # sets whose minimum vertex is root
        stack = [(frozenset({root}), frozenset(
            int(v) for v in g.neighbors(root) if int(v) > root
        ), frozenset())]
        while stack:
            cur, frontier, excluded = stack.pop()
            if len(cur) == k:
                yield cur
                continue
            if not frontier:
                continue
            v = min(frontier)
            rest = frontier - {v}
            # branch 1: exclude v from this subtree
            stack.append((cur, rest, excluded | {v}))
            # branch 2: include v
            new_frontier = rest | {
                int(w) for w in g.neighbors(v)
                if int(w) > root and int(w) not in cur and int(w) not in excluded
            }
            stack.append((cur | {v}, new_frontier, excluded))


def exact_mcg_oracle(wg: WeightedVertexGraph, k: int):
    """Exhaustive optimum over connected k-sets; small-graph test oracle."""
    g = wg.graph
    n = g.vertex_count
    if n > EXACT_MCG_MAX_VERTICES:
        raise ValueError(f"exact search limited to {EXACT_MCG_MAX_VERTICES} vertices")
    if k < 1 or k > n:
        raise ValueError(f"k={k} out of range for {n} vertices")
    best: tuple | None = None
    for s in _connected_ksets(g, k):
        key = (-float(wg.weights[list(s)].sum()), tuple(sorted(s)))
        if best is None or key < best:
            best = key
    if best is None:
        raise ValueError(f"no connected component has {k} vertices")
    return set(best[1]), -best[0]


def _bfs_tree(g: Graph, s: int):
    """BFS distances and smallest-index predecessors from s."""
    n = g.vertex_count
    dist = np.full(n, -1, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    dist[s] = 0
    queue = [s]
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        for v in g.neighbors(u):
            v = int(v)
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                parent[v] = u
                queue.append(v)
    return dist, parent


def steiner_approx(g: Graph, terminals) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Steiner tree 2-approximation: minimum spanning tree of the terminal
    metric closure, expanded back to shortest paths.

    Returns (tree vertices, tree edge ids).
    """
    terms = sorted(set(int(v) for v in terminals))
    if not terms:
        raise ValueError("terminal set must be non-empty")
    for v in terms:
        if v < 0 or v >= g.vertex_count:
            raise ValueError(f"vertex {v} not in graph")
    if len(terms) == 1:
        return (terms[0],), ()
    trees = {t: _bfs_tree(g, t) for t in terms}
    for t in terms[1:]:
        if trees[terms[0]][0][t] < 0:
            raise ValueError("terminals span multiple components")
    # Prim over the metric closure, smallest (distance, endpoint) first
    in_tree = [terms[0]]
    mst_pairs: list[tuple[int, int]] = []
    remaining = terms[1:]
    while remaining:
        cand = min(
            ((int(trees[a][0][b]), a, b) for a in in_tree for b in remaining)
        )
        _, a, b = cand
        mst_pairs.append((a, b))
        in_tree.append(b)
        remaining.remove(b)
    # expand closure edges to real paths via the BFS predecessors from a
    vset: set[int] = set(terms)
    eset: set[int] = set()
    for a, b in mst_pairs:
        parent = trees[a][1]
        v = b
        while v != a:
            p = int(parent[v])
            vset.add(p)
            eset.add(g.edge_id(p, v))
            v = p
    # keep a spanning tree of the expanded union
    sub = sorted(vset)
    adj: dict[int, list[int]] = {v: [] for v in sub}
    for eid in sorted(eset):
        u, v = (int(x) for x in g.edges[eid])
        adj[u].append(v)
        adj[v].append(u)
    root = sub[0]
    seen = {root}
    tree_edges: set[int] = set()
    queue = [root]
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        for v in sorted(adj[u]):
            if v not in seen:
                seen.add(v)
                tree_edges.add(g.edge_id(u, v))
                queue.append(v)
    # strip non-terminal leaves until none remain
    tset = set(terms)
    while True:
        deg: dict[int, int] = {}
        for eid in tree_edges:
            for x in g.edges[eid]:
                deg[int(x)] = deg.get(int(x), 0) + 1
        drop = [
            eid for eid in tree_edges
            if any(deg[int(x)] == 1 and int(x) not in tset for x in g.edges[eid])
        ]
        if not drop:
            break
        tree_edges.difference_update(drop)
    kept: set[int] = set(terms)
    for eid in tree_edges:
        kept.update(int(x) for x in g.edges[eid])
    return tuple(sorted(kept)), tuple(sorted(tree_edges))


def exact_backbone_oracle(
    stats: PathStats, g: Graph, k: int
) -> tuple[Backbone, float]:
    """Exhaustive search over connected k-sets and all edge-consistent
    assignments of their induced edges, maximizing the coarsened model
    log-likelihood. Tiny-instance test oracle."""
    n = g.vertex_count
    if n > EXACT_BACKBONE_MAX_VERTICES or k > EXACT_BACKBONE_MAX_K:
        raise ValueError(
            f"exact search limited to {EXACT_BACKBONE_MAX_VERTICES} vertices "
            f"and k <= {EXACT_BACKBONE_MAX_K}"
        )
    if k < 1 or k > n:
        raise ValueError(f"k={k} out of range for {n} vertices")
    best: tuple | None = None
    for vs in itertools.combinations(range(n), k):
        if not is_connected(g, vs):
            continue
        vset = set(vs)
        cand = [
            eid for eid in range(g.num_edges)
            if int(g.edges[eid][0]) in vset and int(g.edges[eid][1]) in vset
        ]
        for mask in range(1 << len(cand)):
            eids = tuple(cand[i] for i in range(len(cand)) if mask >> i & 1)
            bb = Backbone(vertices=vs, edge_ids=eids)
            ll = loglik_bimodal(g, stats, bb)
            # likelihood ties prefer the sparser assignment, matching the
            # clustering procedures' non-backbone bias
            key = (-ll, vs, len(eids), eids)
            if best is None or key < best:
                best = key
    if best is None:
        raise ValueError(f"no connected component has {k} vertices")
    return Backbone(vertices=best[1], edge_ids=best[3]), -best[0]
