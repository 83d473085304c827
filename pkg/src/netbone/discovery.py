"""End-to-end backbone discovery pipelines.

Three methods share one result shape:

* ``vb``   betweenness baseline: top-K betweenness vertices, joined by an
           approximate Steiner tree, then trimmed back to K.
* ``mcg``  per-vertex benefit weights feeding the maximum-weight connected
           subgraph heuristic, then edge-consistent clustering on the pick.
* ``iter`` mcg followed by randomized swap refinement, keeping the best
           lower-bound score seen.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, is_connected
from .models import (
    Backbone,
    ModelReport,
    fit_independent,
    model_report,
    vertex_benefit_F,
)
from .partition import bi_kl_partition, gbi_kl_partition
from .pathstats import PathStats, vertex_betweenness
from .subgraph import WeightedVertexGraph, mcg_heuristic

TOLERANCE = 1e-9
METHODS = ("vb", "mcg", "iter")


@dataclass
class DiscoveryConfig:
    method: str
    k: int
    seed: int = 0
    restarts: int = 5
    max_refine_iters: int | None = None   # default 10 * |V|, set at run time
    tolerance: float = TOLERANCE

    def validate(self, g: Graph) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.k < 1:
            raise ValueError("K must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        _check_feasible(g, self.k)


@dataclass
class DiscoveryResult:
    backbone: Backbone
    report: ModelReport
    # iter: one (W_H, W_L, W) triple per refinement step; otherwise the
    # clustering objective per sweep
    trace: list = field(default_factory=list)
    preprocess_seconds: float = 0.0
    discover_seconds: float = 0.0
    best_score: float = 0.0


def _check_feasible(g: Graph, k: int) -> None:
    if k < 1:
        raise ValueError("K must be positive")
    sizes = _component_sizes(g)
    if not sizes or max(sizes) < k:
        raise ValueError(
            f"K={k} infeasible: largest connected component has "
            f"{max(sizes) if sizes else 0} vertices"
        )


def _component_sizes(g: Graph) -> list[int]:
    seen = np.zeros(g.vertex_count, dtype=bool)
    sizes = []
    for s in range(g.vertex_count):
        if seen[s]:
            continue
        seen[s] = True
        stack = [s]
        size = 0
        while stack:
            u = stack.pop()
            size += 1
            for v in g.neighbors(u):
                v = int(v)
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        sizes.append(size)
    return sizes


def discover(g: Graph, stats: PathStats, config: DiscoveryConfig) -> DiscoveryResult:
    config.validate(g)
    if config.method == "vb":
        return discover_vb(g, stats, config.k)
    if config.method == "mcg":
        return discover_mcg(g, stats, config.k, config.seed, config.restarts)
    return discover_iter(
        g, stats, config.k, config.seed, config.restarts, config.max_refine_iters
    )


# -- betweenness baseline -------------------------------------------------

def discover_vb(g: Graph, stats: PathStats, k: int) -> DiscoveryResult:
    """Deterministic baseline: Steiner-join the K highest-betweenness
    vertices, then shed the lowest-betweenness removable vertices until
    exactly K remain; every induced edge becomes a backbone edge."""
    t0 = time.perf_counter()
    _check_feasible(g, k)
    bc = vertex_betweenness(g)
    ranked = sorted(range(g.vertex_count), key=lambda v: (-bc[v], v))
    terminals = _top_k_connected(g, ranked, k)
    vset, _ = _steiner_vertices(g, terminals)
    chosen = set(vset)
    # queue in ascending betweenness; non-removable vertices rotate to the back
    queue = sorted(chosen, key=lambda v: (bc[v], v))
    while len(chosen) > k:
        v = queue.pop(0)
        if is_connected(g, chosen - {v}):
            chosen.remove(v)
        else:
            queue.append(v)
    vs = tuple(sorted(chosen))
    eids = tuple(
        eid for eid in range(g.num_edges)
        if int(g.edges[eid][0]) in chosen and int(g.edges[eid][1]) in chosen
    )
    backbone = Backbone(vertices=vs, edge_ids=eids)
    backbone.validate(g)
    report = model_report(g, stats, backbone)
    return DiscoveryResult(
        backbone=backbone,
        report=report,
        trace=[],
        discover_seconds=time.perf_counter() - t0,
        best_score=report.loglik_bimodal,
    )


def _top_k_connected(g: Graph, ranked: list[int], k: int) -> list[int]:
    """First k ranked vertices that can still be joined by paths: restrict
    to the component holding the best-ranked feasible vertex."""
    comp = _component_labels(g)
    sizes = np.bincount(comp)
    for v in ranked:
        if sizes[comp[v]] >= k:
            target = comp[v]
            break
    picked = [v for v in ranked if comp[v] == target]
    return picked[:k]


def _component_labels(g: Graph) -> np.ndarray:
    comp = np.full(g.vertex_count, -1, dtype=np.int64)
    c = 0
    for s in range(g.vertex_count):
        if comp[s] >= 0:
            continue
        comp[s] = c
        stack = [s]
        while stack:
            u = stack.pop()
            for v in g.neighbors(u):
                v = int(v)
                if comp[v] < 0:
                    comp[v] = c
                    stack.append(v)
        c += 1
    return comp


def _steiner_vertices(g: Graph, terminals):
    from .subgraph import steiner_approx
    return steiner_approx(g, terminals)


# -- benefit-weighted search ----------------------------------------------

def _vertex_weights(g: Graph, stats: PathStats, seed: int, restarts: int):
    """Per-vertex benefit weights from independently clustered vertices."""
    p_ind = fit_independent(g, stats)
    weights = np.zeros(g.vertex_count, dtype=np.float64)
    for u in range(g.vertex_count):
        part, row, _ = bi_kl_partition(g, stats, u, seed=seed, restarts=restarts)
        weights[u] = vertex_benefit_F(g, stats, part, row, p_ind)
    return weights


def _consistent_benefits(
    g, stats, backbone: Backbone, centroids, p_ind
) -> dict[int, float]:
    """Per-vertex benefits evaluated at the edge-consistent clustering's
    centroids; their sum is the achievable lower bound."""
    return {
        u: vertex_benefit_F(g, stats, part, centroids[u], p_ind)
        for u, part in backbone.partitions(g).items()
    }


def _consistent_score(g, stats, backbone: Backbone, centroids, p_ind) -> float:
    return sum(_consistent_benefits(g, stats, backbone, centroids, p_ind).values())


def discover_mcg(
    g: Graph, stats: PathStats, k: int, seed: int = 0, restarts: int = 5
) -> DiscoveryResult:
    t0 = time.perf_counter()
    _check_feasible(g, k)
    weights = _vertex_weights(g, stats, seed, restarts)
    wg = WeightedVertexGraph(g, weights)
    vb = mcg_heuristic(wg, k)
    eids, centroids, trace = gbi_kl_partition(
        g, stats, vb, seed=seed, restarts=restarts
    )
    backbone = Backbone(vertices=tuple(sorted(vb)), edge_ids=eids)
    backbone.validate(g)
    report = model_report(g, stats, backbone, centroids)
    p_ind = fit_independent(g, stats)
    score = _consistent_score(g, stats, backbone, centroids, p_ind)
    return DiscoveryResult(
        backbone=backbone,
        report=report,
        trace=list(trace.objective),
        discover_seconds=time.perf_counter() - t0,
        best_score=score,
    )


def discover_iter(
    g: Graph,
    stats: PathStats,
    k: int,
    seed: int = 0,
    restarts: int = 5,
    max_refine_iters: int | None = None,
) -> DiscoveryResult:
    """Swap refinement around the mcg candidate.

    Tracks an upper bound W_H (sum of relaxed per-vertex optima over the
    candidate) and a lower bound W_L (benefit at the consistent clustering);
    W is the best W_L seen. Each step swaps a random removable candidate
    vertex for the best-benefit neighbor and re-clusters, warm-started from
    the previous assignment.
    """
    t0 = time.perf_counter()
    _check_feasible(g, k)
    if max_refine_iters is None:
        max_refine_iters = 10 * g.vertex_count
    weights = _vertex_weights(g, stats, seed, restarts)
    p_ind = fit_independent(g, stats)
    wg = WeightedVertexGraph(g, weights)
    start_vb = frozenset(mcg_heuristic(wg, k))
    start_eids, start_centroids, _ = gbi_kl_partition(
        g, stats, start_vb, seed=seed, restarts=restarts
    )
    start_backbone = Backbone(vertices=tuple(sorted(start_vb)), edge_ids=start_eids)
    start_bens = _consistent_benefits(g, stats, start_backbone, start_centroids, p_ind)
    start_score = sum(start_bens.values())
    # a consistent assignment is feasible for each vertex's relaxed problem,
    # so its per-vertex benefit tightens the relaxed-optimum estimate
    for u, b in start_bens.items():
        weights[u] = max(weights[u], b)

    best = (start_score, start_backbone, start_centroids)
    trace: list[tuple[float, float, float]] = []
    w_h0 = float(sum(weights[v] for v in start_vb))
    trace.append((w_h0, start_score, start_score))

    gbi_cache: dict = {}
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        cand = set(start_vb)
        arcs = set(start_backbone.arc_set(g))
        removed: set[int] = set()
        w_h = w_h0
        w = best[0]
        steps = 0
        while len(removed) + len(cand) < g.vertex_count and w_h > w + TOLERANCE:
            if steps >= max_refine_iters:
                break
            steps += 1
            v = _removable_choice(g, cand, rng)
            if v is None:
                break
            u = _best_neighbor(g, cand - {v}, removed | {v}, weights)
            if u is None:
                break
            cand.remove(v)
            removed.add(v)
            cand.add(u)
            # warm start: keep the previous assignment on surviving edges
            init = {
                a for a in arcs
                if int(g.arc_tail[a]) in cand and int(g.nbrs[a]) in cand
                and int(g.arc_tail[a]) != v and int(g.nbrs[a]) != v
            }
            eids, centroids, _ = gbi_kl_partition(
                g, stats, cand, init=init, cache=gbi_cache
            )
            bb = Backbone(vertices=tuple(sorted(cand)), edge_ids=eids)
            arcs = set(bb.arc_set(g))
            bens = _consistent_benefits(g, stats, bb, centroids, p_ind)
            w_l = sum(bens.values())
            for x, b in bens.items():
                weights[x] = max(weights[x], b)
            w_h = float(sum(weights[x] for x in cand))
            if w_l > w + TOLERANCE:
                w = w_l
                if w > best[0] + TOLERANCE or (
                    abs(w - best[0]) <= TOLERANCE
                    and bb.vertices < best[1].vertices
                ):
                    best = (w, bb, centroids)
            trace.append((w_h, w_l, w))

    score, backbone, centroids = best
    backbone.validate(g)
    report = model_report(g, stats, backbone, centroids)
    return DiscoveryResult(
        backbone=backbone,
        report=report,
        trace=trace,
        discover_seconds=time.perf_counter() - t0,
        best_score=score,
    )


def _removable_choice(g: Graph, cand: set[int], rng) -> int | None:
    """Random candidate vertex whose removal keeps the rest connected;
    resamples without replacement up to |cand| times."""
    pool = sorted(cand)
    order = rng.permutation(len(pool))
    for idx in order:
        v = pool[int(idx)]
        rest = cand - {v}
        if rest and is_connected(g, rest):
            return v
    return None


def _best_neighbor(g: Graph, cand: set[int], banned: set[int], weights):
    best = None
    for u in cand:
        for v in g.neighbors(u):
            v = int(v)
            if v in cand or v in banned:
                continue
            key = (-float(weights[v]), v)
            if best is None or key < best:
                best = key
    return best[1] if best is not None else None
