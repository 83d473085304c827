"""Path generation models over the traffic counters.

Three nested models are fit by maximum likelihood:

* independent: each outgoing arc of a vertex has one probability;
* markovian: each arc's probability conditions on the preceding arc;
* bimodal: at backbone vertices the conditioning collapses to whether the
  incoming arc is a backbone arc, everywhere else markovian.

All log-likelihoods are in nats with the 0*log(0) = 0 convention.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .pathstats import PathStats


@dataclass(frozen=True)
class IncomingPartition:
    """Split of a vertex's incoming arcs into backbone / non-backbone."""

    vertex: int
    backbone_in: frozenset[int]   # arc ids entering the vertex

    def validate(self, g: Graph) -> None:
        incoming = set(int(a) for a in g.in_arcs(self.vertex))
        bad = self.backbone_in - incoming
        if bad:
            raise ValueError(
                f"arcs {sorted(bad)} do not enter vertex {self.vertex}"
            )

    def in_mask(self, g: Graph) -> np.ndarray:
        """Boolean mask over the incoming arcs in adjacency order."""
        u = self.vertex
        return np.array(
            [int(a) in self.backbone_in for a in g.in_arcs(u)], dtype=bool
        )


@dataclass(frozen=True)
class Backbone:
    """Connected K-vertex set plus a consistent set of its induced edges."""

    vertices: tuple[int, ...]     # sorted
    edge_ids: tuple[int, ...]     # sorted undirected edge ids

    @property
    def k(self) -> int:
        return len(self.vertices)

    def validate(self, g: Graph) -> None:
        from .graph import is_connected

        vs = set(self.vertices)
        if not vs:
            if self.edge_ids:
                raise ValueError("backbone has edges but no vertices")
            return
        if not is_connected(g, vs):
            raise ValueError("backbone vertex set is not connected")
        for eid in self.edge_ids:
            u, v = (int(x) for x in g.edges[eid])
            if u not in vs or v not in vs:
                raise ValueError(f"backbone edge {eid} leaves the vertex set")

    def arc_set(self, g: Graph) -> set[int]:
        """Both arcs of each backbone edge."""
        arcs: set[int] = set()
        for eid in self.edge_ids:
            u, v = (int(x) for x in g.edges[eid])
            a = g.arc_id(u, v)
            arcs.add(a)
            arcs.add(int(g.rev[a]))
        return arcs

    def partitions(self, g: Graph) -> dict[int, IncomingPartition]:
        """Per backbone vertex, the induced split of its incoming arcs."""
        arcs = self.arc_set(g)
        out: dict[int, IncomingPartition] = {}
        for u in self.vertices:
            backbone_in = frozenset(
                int(a) for a in g.in_arcs(u) if int(a) in arcs
            )
            out[u] = IncomingPartition(vertex=u, backbone_in=backbone_in)
        return out


@dataclass
class CentroidRow:
    """Cluster-conditional distributions over a vertex's outgoing arcs.

    An empty cluster (no counts) has an absent distribution (None).
    """

    vertex: int
    p_backbone: np.ndarray | None
    p_other: np.ndarray | None


CentroidTable = dict[int, CentroidRow]


@dataclass
class ModelReport:
    loglik_independent: float
    loglik_markovian: float
    loglik_bimodal: float
    param_em: int
    param_bm: int
    reduction_ratio: float
    accuracy_ratio: float
    k: int
    backbone_vertices: list[str]
    backbone_edges: list[tuple[str, str]]
    edge_density: float
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "loglik_independent": self.loglik_independent,
            "loglik_markovian": self.loglik_markovian,
            "loglik_bimodal": self.loglik_bimodal,
            "param_em": self.param_em,
            "param_bm": self.param_bm,
            "reduction_ratio": self.reduction_ratio,
            "accuracy_ratio": self.accuracy_ratio,
            "k": self.k,
            "backbone_vertices": self.backbone_vertices,
            "backbone_edges": [list(e) for e in self.backbone_edges],
            "edge_density": self.edge_density,
            **({"notes": self.notes} if self.notes else {}),
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


# -- low-level helpers -----------------------------------------------------


def _xlogx_minus(counts: np.ndarray, denom: np.ndarray) -> float:
    """Sum of c * log(c / denom) with 0 * log(0) = 0."""
    c = np.asarray(counts, dtype=np.float64)
    mask = c > 0
    if not np.any(mask):
        return 0.0
    d = np.asarray(denom, dtype=np.float64)[mask]
    return float(np.sum(c[mask] * (np.log(c[mask]) - np.log(d))))


def _count_logsum(counts: np.ndarray, probs: np.ndarray | None) -> float:
    """Sum of c * log(p); -inf when some counted event has p = 0 or the
    distribution is absent while counts are positive."""
    c = np.asarray(counts, dtype=np.float64)
    mask = c > 0
    if not np.any(mask):
        return 0.0
    if probs is None:
        return float("-inf")
    p = np.asarray(probs, dtype=np.float64)[mask]
    if np.any(p <= 0):
        return float("-inf")
    return float(np.sum(c[mask] * np.log(p)))


def _first_arc_loglik(g: Graph, stats: PathStats) -> float:
    """Sum over arcs of N'_e * log p0(e), p0 normalized per tail vertex."""
    starts = stats.n_start.astype(np.float64)
    tail_tot = np.zeros(g.vertex_count, dtype=np.float64)
    np.add.at(tail_tot, g.arc_tail, starts)
    mask = starts > 0
    return float(np.sum(
        starts[mask] * (np.log(starts[mask]) - np.log(tail_tot[g.arc_tail[mask]]))
    ))


def _markovian_vertex_term(table: np.ndarray) -> float:
    """Sum of N_{e'e} * log(N_{e'e} / M_{e'}) over one vertex's table."""
    t = table.astype(np.float64)
    rows = t.sum(axis=1)
    total = 0.0
    mask = t > 0
    if np.any(mask):
        logs = np.zeros_like(t)
        logs[mask] = np.log(t[mask])
        row_logs = np.zeros_like(rows)
        rmask = rows > 0
        row_logs[rmask] = np.log(rows[rmask])
        total = float(np.sum(t[mask] * (logs - row_logs[:, None])[mask]))
    return total


# -- model fits ------------------------------------------------------------


def fit_independent(g: Graph, stats: PathStats) -> np.ndarray:
    """Per-arc probability N_e / M_tail; 0 where the vertex carries nothing."""
    p = np.zeros(g.num_arcs, dtype=np.float64)
    m = stats.m_vertex[g.arc_tail].astype(np.float64)
    mask = m > 0
    p[mask] = stats.n_arc[mask] / m[mask]
    return p


def fit_markovian(g: Graph, stats: PathStats):
    """First-arc distribution and per-vertex conditional tables.

    Returns (p0, cond) where p0 is a per-arc array and cond[u] is the
    (deg, deg) row-normalized table for vertex u, or None when no traffic
    passes through u.
    """
    starts = stats.n_start.astype(np.float64)
    tail_tot = np.zeros(g.vertex_count, dtype=np.float64)
    np.add.at(tail_tot, g.arc_tail, starts)
    p0 = np.zeros(g.num_arcs, dtype=np.float64)
    mask = tail_tot[g.arc_tail] > 0
    p0[mask] = starts[mask] / tail_tot[g.arc_tail[mask]]
    cond: list[np.ndarray | None] = []
    for u in range(g.vertex_count):
        t = stats.seg_table(g, u).astype(np.float64)
        rows = t.sum(axis=1)
        if not np.any(rows > 0):
            cond.append(None)
            continue
        out = np.zeros_like(t)
        rmask = rows > 0
        out[rmask] = t[rmask] / rows[rmask, None]
        cond.append(out)
    return p0, cond


def loglik_independent(g: Graph, stats: PathStats) -> float:
    m = stats.m_vertex[g.arc_tail].astype(np.float64)
    return _xlogx_minus(stats.n_arc, m)


def loglik_markovian(g: Graph, stats: PathStats) -> float:
    total = _first_arc_loglik(g, stats)
    for u in range(g.vertex_count):
        total += _markovian_vertex_term(stats.seg_table(g, u))
    return total


def ml_centroids(g: Graph, stats: PathStats, part: IncomingPartition) -> CentroidRow:
    """Maximum-likelihood cluster distributions for a fixed partition."""
    part.validate(g)
    u = part.vertex
    table = stats.seg_table(g, u)
    mask = part.in_mask(g)
    nb = table[mask].sum(axis=0).astype(np.float64)
    nbar = table[~mask].sum(axis=0).astype(np.float64)
    p_b = nb / nb.sum() if nb.sum() > 0 else None
    p_o = nbar / nbar.sum() if nbar.sum() > 0 else None
    return CentroidRow(vertex=u, p_backbone=p_b, p_other=p_o)


def _bimodal_vertex_term(
    table: np.ndarray, mask: np.ndarray, row: CentroidRow
) -> float:
    nb = table[mask].sum(axis=0)
    nbar = table[~mask].sum(axis=0)
    return _count_logsum(nb, row.p_backbone) + _count_logsum(nbar, row.p_other)


def loglik_bimodal(
    g: Graph,
    stats: PathStats,
    partitions,
    centroids: CentroidTable | None = None,
) -> float:
    """Log-likelihood of the coarsened model.

    ``partitions`` is a Backbone or a mapping vertex -> IncomingPartition;
    vertices not present keep their full markovian conditionals. Centroids
    default to the ML centroids of the given assignment.
    """
    if isinstance(partitions, Backbone):
        partitions = partitions.partitions(g)
    total = _first_arc_loglik(g, stats)
    for u in range(g.vertex_count):
        table = stats.seg_table(g, u)
        if u in partitions:
            part = partitions[u]
            part.validate(g)
            row = centroids[u] if centroids is not None else ml_centroids(g, stats, part)
            total += _bimodal_vertex_term(table, part.in_mask(g), row)
        else:
            total += _markovian_vertex_term(table)
    return total


def neg_log_lr_vertex(
    g: Graph,
    stats: PathStats,
    part: IncomingPartition,
    centroids: CentroidRow | None = None,
) -> float:
    """Weighted within-cluster KL objective for one vertex's partition.

    With ML centroids (the default) this is the markovian-vs-bimodal
    log-likelihood gap at the vertex and is always >= 0.
    """
    part.validate(g)
    u = part.vertex
    table = stats.seg_table(g, u)
    mask = part.in_mask(g)
    row = centroids if centroids is not None else ml_centroids(g, stats, part)
    return _markovian_vertex_term(table) - _bimodal_vertex_term(table, mask, row)


def vertex_benefit_F(
    g: Graph,
    stats: PathStats,
    part: IncomingPartition,
    centroids: CentroidRow | None = None,
    p_independent: np.ndarray | None = None,
) -> float:
    """Log-likelihood gain of modeling a vertex bimodally instead of
    independently: sum over outgoing arcs of cluster counts times
    log(cluster probability / independent probability)."""
    u = part.vertex
    table = stats.seg_table(g, u)
    mask = part.in_mask(g)
    row = centroids if centroids is not None else ml_centroids(g, stats, part)
    if p_independent is None:
        p_independent = fit_independent(g, stats)
    lo, hi = int(g.indptr[u]), int(g.indptr[u + 1])
    p_ind = p_independent[lo:hi]
    nb = table[mask].sum(axis=0)
    nbar = table[~mask].sum(axis=0)
    total = 0.0
    for counts, probs in ((nb, row.p_backbone), (nbar, row.p_other)):
        total += _count_logsum(counts, probs) - _count_logsum(counts, p_ind)
    return total


def neg_log_lr_vertexset(
    g: Graph,
    stats: PathStats,
    backbone: Backbone,
    centroids: CentroidTable | None = None,
) -> float:
    """Markovian-vs-bimodal gap summed over the backbone vertices.

    Equals loglik_markovian - loglik_bimodal for the same assignment.
    """
    backbone.validate(g)
    parts = backbone.partitions(g)
    total = 0.0
    for u, part in parts.items():
        row = centroids[u] if centroids is not None else None
        total += neg_log_lr_vertex(g, stats, part, row)
    return total


def param_counts(g: Graph, backbone: Backbone | None) -> tuple[int, int]:
    """(markovian, bimodal) parameter counts: deg^2 per plain vertex,
    2*deg per backbone vertex."""
    degs = np.diff(g.indptr).astype(np.int64)
    em = int(np.sum(degs * degs))
    if backbone is None or not backbone.vertices:
        return em, em
    vb = np.array(backbone.vertices, dtype=np.int64)
    bm = em - int(np.sum(degs[vb] * degs[vb])) + int(np.sum(2 * degs[vb]))
    return em, bm


def model_report(
    g: Graph,
    stats: PathStats,
    backbone: Backbone,
    centroids: CentroidTable | None = None,
) -> ModelReport:
    if backbone.k == 0:
        raise ValueError("backbone must have at least one vertex")
    backbone.validate(g)
    ll_i = loglik_independent(g, stats)
    ll_m = loglik_markovian(g, stats)
    ll_b = loglik_bimodal(g, stats, backbone, centroids)
    em, bm = param_counts(g, backbone)
    reduction = (em - bm) / em if em else 0.0
    if ll_m == 0.0 or ll_b == 0.0:
        accuracy = 1.0
    else:
        accuracy = ll_m / ll_b
    edge_labels = [
        (g.labels[int(g.edges[eid][0])], g.labels[int(g.edges[eid][1])])
        for eid in backbone.edge_ids
    ]
    return ModelReport(
        loglik_independent=ll_i,
        loglik_markovian=ll_m,
        loglik_bimodal=ll_b,
        param_em=em,
        param_bm=bm,
        reduction_ratio=reduction,
        accuracy_ratio=accuracy,
        k=backbone.k,
        backbone_vertices=[g.labels[v] for v in backbone.vertices],
        backbone_edges=edge_labels,
        edge_density=len(backbone.edge_ids) / backbone.k,
    )
