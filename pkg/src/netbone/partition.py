"""Two-cluster partitioning of incoming arcs under weighted KL distance.

`bi_kl_partition` clusters one vertex's incoming arcs independently of the
rest of the graph (the relaxed problem). `gbi_kl_partition` clusters the
undirected edges inside a vertex set as units, so both arcs of an edge land
in the same category, with edges leaving the set pinned to non-backbone.

Both are k-means-style batch iterations: assign every point to the nearest
centroid, then recompute maximum-likelihood centroids, until a full sweep
changes nothing. The recorded objective is the total weighted within-cluster
KL divergence, which is non-increasing across sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .models import CentroidRow, CentroidTable, IncomingPartition
from .pathstats import PathStats

DEFAULT_MAX_ITERS = 200
OBJECTIVE_TOL = 1e-9


@dataclass
class PartitionTrace:
    objective: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    seed: int = 0


def _row_entropy_const(t: np.ndarray) -> np.ndarray:
    """Per row: sum of T * log(T / rowsum), the assignment-independent part."""
    rows = t.sum(axis=1)
    out = np.zeros(t.shape[0], dtype=np.float64)
    mask = t > 0
    if np.any(mask):
        logs = np.where(mask, np.log(np.where(mask, t, 1.0)), 0.0)
        row_logs = np.where(rows > 0, np.log(np.where(rows > 0, rows, 1.0)), 0.0)
        out = np.sum(t * (logs - row_logs[:, None]), axis=1, where=mask)
    return out


def _log_centroid(counts: np.ndarray):
    """(log distribution, zero mask) or (None, None) for an empty cluster."""
    total = counts.sum()
    if total <= 0:
        return None, None
    zero = counts <= 0
    logc = np.where(zero, 0.0, np.log(np.where(zero, 1.0, counts / total)))
    return logc, zero


def _row_distances(t, const, logc, zero):
    """Weighted KL distance of each row to a centroid.

    Absent centroid or an all-zero row contributes 0 per convention; a row
    with mass where the centroid has none is at infinite distance.
    """
    k = t.shape[0]
    if logc is None:
        return np.zeros(k, dtype=np.float64)
    d = const - t @ logc
    viol = ((t > 0) & zero[None, :]).any(axis=1)
    d[viol] = np.inf
    d[t.sum(axis=1) <= 0] = 0.0
    return d


def bi_kl_partition(
    g: Graph,
    stats: PathStats,
    u: int,
    seed: int = 0,
    restarts: int = 5,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> tuple[IncomingPartition, CentroidRow, PartitionTrace]:
    """Best-of-restarts local optimum of the per-vertex KL objective.

    Points are the incoming arcs with positive through-traffic; arcs without
    traffic are pinned to the non-backbone cluster. Ties go non-backbone.
    """
    if u < 0 or u >= g.vertex_count:
        raise ValueError(f"vertex {u} out of range")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    in_arcs = np.asarray(g.in_arcs(u))
    t_full = stats.seg_table(g, u).astype(np.float64)
    active = t_full.sum(axis=1) > 0
    t = t_full[active]
    n_pts = t.shape[0]
    trace = PartitionTrace(seed=seed)

    def result(mask_active: np.ndarray) -> tuple[IncomingPartition, CentroidRow]:
        mask = np.zeros(len(in_arcs), dtype=bool)
        mask[active] = mask_active
        part = IncomingPartition(
            vertex=u, backbone_in=frozenset(int(a) for a in in_arcs[mask])
        )
        from .models import ml_centroids
        return part, ml_centroids(g, stats, part)

    if len(in_arcs) < 2 or n_pts < 2:
        part, row = result(np.zeros(n_pts, dtype=bool))
        trace.objective = [0.0]
        trace.converged = True
        return part, row, trace

    const = _row_entropy_const(t)
    rng = np.random.default_rng(seed)
    best = None
    for r in range(restarts):
        assign = rng.random(n_pts) < 0.5
        objs: list[float] = []
        converged = False
        iters = 0
        for _ in range(max_iters):
            nb = t[assign].sum(axis=0)
            no = t[~assign].sum(axis=0)
            log_b, zero_b = _log_centroid(nb)
            log_o, zero_o = _log_centroid(no)
            d_b = _row_distances(t, const, log_b, zero_b)
            d_o = _row_distances(t, const, log_o, zero_o)
            obj = float(np.sum(np.where(assign, d_b, d_o)))
            objs.append(obj)
            new_assign = d_b < d_o
            iters += 1
            if np.array_equal(new_assign, assign):
                # the next sweep would repeat this objective exactly
                objs.append(obj)
                converged = True
                break
            if len(objs) >= 2 and objs[-2] - objs[-1] <= OBJECTIVE_TOL:
                converged = True
                break
            assign = new_assign
        cand = (objs[-1], r, assign, objs, converged, iters)
        if best is None or cand[0] < best[0]:
            best = cand
    _, _, assign, objs, converged, iters = best
    trace.objective = objs
    trace.iterations = iters
    trace.converged = converged
    part, row = result(assign)
    return part, row, trace


def _edge_consistent_arcs(g: Graph, arcs) -> set[int]:
    arcs = set(int(a) for a in arcs)
    for a in arcs:
        if int(g.rev[a]) not in arcs:
            raise ValueError(f"arc {a} assigned backbone without its reverse")
    return arcs


def gbi_kl_partition(
    g: Graph,
    stats: PathStats,
    vertex_set,
    seed: int = 0,
    restarts: int = 5,
    init=None,
    max_iters: int = DEFAULT_MAX_ITERS,
    cache: dict | None = None,
) -> tuple[tuple[int, ...], CentroidTable, PartitionTrace]:
    """Edge-consistent clustering of the edges inside a vertex set.

    Returns (backbone edge ids, per-vertex centroids, trace). When `init`
    (an edge-consistent arc set over the induced edges) is given, a single
    run starts from it; otherwise `restarts` seeded random runs are made and
    the best final objective wins. A caller-owned `cache` dict reuses the
    per-vertex tables across repeated calls on overlapping vertex sets.
    """
    vs = sorted(set(int(v) for v in vertex_set))
    if not vs:
        raise ValueError("vertex set must be non-empty")
    vset = set(vs)

    # per-vertex tables and per-row constants; row i of vertex u is the
    # incoming arc from neighbor g.neighbors(u)[i]
    tables: dict[int, np.ndarray] = {}
    consts: dict[int, np.ndarray] = {}
    nbr_pos: dict[int, dict[int, int]] = {}
    for u in vs:
        if cache is not None and u in cache:
            tables[u], consts[u], nbr_pos[u] = cache[u]
            continue
        t = stats.seg_table(g, u).astype(np.float64)
        tables[u] = t
        consts[u] = _row_entropy_const(t)
        nbr_pos[u] = {int(w): i for i, w in enumerate(g.neighbors(u))}
        if cache is not None:
            cache[u] = (tables[u], consts[u], nbr_pos[u])

    # candidate edges: both endpoints inside the set
    cand = set()
    for u in vs:
        for pos in range(int(g.indptr[u]), int(g.indptr[u + 1])):
            if int(g.nbrs[pos]) in vset:
                cand.add(int(g.arc_edge[pos]))
    cand_edges = sorted(cand)
    n_cand = len(cand_edges)
    # candidate edge -> (u, row of v in u's table, v, row of u in v's table)
    edge_rows = []
    for eid in cand_edges:
        u, v = (int(x) for x in g.edges[eid])
        edge_rows.append((u, nbr_pos[u][v], v, nbr_pos[v][u]))
    # rows pinned non-backbone (boundary arcs and non-candidate incidences)
    cand_row_mask: dict[int, np.ndarray] = {
        u: np.zeros(len(nbr_pos[u]), dtype=bool) for u in vs
    }
    for (u, ru, v, rv) in edge_rows:
        cand_row_mask[u][ru] = True
        cand_row_mask[v][rv] = True

    def run(assign: np.ndarray):
        objs: list[float] = []
        converged = False
        iters = 0
        centroids: CentroidTable = {}
        prev = None
        for _ in range(max_iters):
            b_rows: dict[int, np.ndarray] = {
                u: np.zeros(len(nbr_pos[u]), dtype=bool) for u in vs
            }
            for j, (u, ru, v, rv) in enumerate(edge_rows):
                if assign[j]:
                    b_rows[u][ru] = True
                    b_rows[v][rv] = True
            log_b, zero_b, log_o, zero_o, d_b, d_o = {}, {}, {}, {}, {}, {}
            obj = 0.0
            centroids = {}
            for u in vs:
                t = tables[u]
                nb = t[b_rows[u]].sum(axis=0) if t.shape[0] else t.sum(axis=0)
                no = t.sum(axis=0) - nb
                log_b[u], zero_b[u] = _log_centroid(nb)
                log_o[u], zero_o[u] = _log_centroid(no)
                d_b[u] = _row_distances(t, consts[u], log_b[u], zero_b[u])
                d_o[u] = _row_distances(t, consts[u], log_o[u], zero_o[u])
                obj += float(np.sum(np.where(b_rows[u], d_b[u], d_o[u])))
                tot_b, tot_o = nb.sum(), no.sum()
                centroids[u] = CentroidRow(
                    vertex=u,
                    p_backbone=nb / tot_b if tot_b > 0 else None,
                    p_other=no / tot_o if tot_o > 0 else None,
                )
            # a sweep that joins an empty cluster scores it as free, which
            # can raise the true objective; reject such a sweep and stop at
            # the previous state so recorded traces stay non-increasing
            if prev is not None and obj > prev[2] + OBJECTIVE_TOL:
                assign, centroids = prev[0], prev[1]
                objs.append(objs[-1])
                converged = True
                break
            objs.append(obj)
            new_assign = np.empty(n_cand, dtype=bool)
            for j, (u, ru, v, rv) in enumerate(edge_rows):
                f_b = d_b[u][ru] + d_b[v][rv]
                f_o = d_o[u][ru] + d_o[v][rv]
                new_assign[j] = f_b < f_o
            iters += 1
            if np.array_equal(new_assign, assign):
                objs.append(obj)
                converged = True
                break
            if len(objs) >= 2 and objs[-2] - objs[-1] <= OBJECTIVE_TOL:
                converged = True
                break
            prev = (assign, centroids, obj)
            assign = new_assign
        return assign, centroids, objs, converged, iters

    if init is not None:
        arcs = _edge_consistent_arcs(g, init)
        cand_index = {eid: j for j, eid in enumerate(cand_edges)}
        init_assign = np.zeros(n_cand, dtype=bool)
        for a in arcs:
            eid = int(g.arc_edge[a])
            if eid not in cand_index:
                raise ValueError(f"init arc {a} is not inside the vertex set")
            init_assign[cand_index[eid]] = True
        runs = [run(init_assign)]
    else:
        rng = np.random.default_rng(seed)
        runs = [run(rng.random(n_cand) < 0.5) for _ in range(max(1, restarts))]

    best = min(range(len(runs)), key=lambda i: runs[i][2][-1])
    assign, centroids, objs, converged, iters = runs[best]
    trace = PartitionTrace(
        objective=objs, iterations=iters, converged=converged, seed=seed
    )
    edge_ids = tuple(sorted(cand_edges[j] for j in range(n_cand) if assign[j]))
    return edge_ids, centroids, trace
