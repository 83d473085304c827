"""Undirected graph with a bidirected arc index.

Each undirected edge (u, v) is materialized as two directed arcs
(u -> v) and (v -> u), each with its own dense arc id. Arc ids follow
CSR adjacency order, so the arcs leaving vertex u occupy the slice
``indptr[u]:indptr[u+1]`` and are sorted by head vertex.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)


class EdgeListParseError(ValueError):
    """Raised when an edge-list text cannot be parsed."""


@dataclass
class Graph:
    """Immutable simple undirected graph over dense vertex indices [0, n).

    External string labels map to indices in first-appearance order.
    """

    labels: list[str]
    indptr: np.ndarray          # (n+1,) int64, CSR row pointers
    nbrs: np.ndarray            # (2m,) int32, neighbor indices, ascending per row
    edges: np.ndarray           # (m, 2) int32, canonical (u, v) with u < v, sorted
    arc_edge: np.ndarray = field(init=False)   # (2m,) int32, owning edge id per arc
    arc_tail: np.ndarray = field(init=False)   # (2m,) int32
    rev: np.ndarray = field(init=False)        # (2m,) int64, opposite arc id
    label_index: dict[str, int] = field(init=False)

    def __post_init__(self):
        n = len(self.labels)
        self.label_index = {lab: i for i, lab in enumerate(self.labels)}
        tails = np.repeat(np.arange(n, dtype=np.int32), np.diff(self.indptr))
        self.arc_tail = tails
        # Arcs are sorted by (tail, head), so the opposite arc's position is
        # a binary search on the flattened key array.
        heads = self.nbrs
        keys = tails.astype(np.int64) * max(n, 1) + heads
        self.rev = np.searchsorted(keys, heads.astype(np.int64) * max(n, 1) + tails)
        # edge id per arc: edges are sorted (u, v) pairs with u < v
        m = len(self.edges)
        edge_key = self.edges[:, 0].astype(np.int64) * n + self.edges[:, 1]
        lo = np.minimum(tails, heads).astype(np.int64)
        hi = np.maximum(tails, heads).astype(np.int64)
        self.arc_edge = np.searchsorted(edge_key, lo * n + hi).astype(np.int32)

    # -- basic accessors -------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_arcs(self) -> int:
        return len(self.nbrs)

    def degree(self, u: int) -> int:
        return int(self.indptr[u + 1] - self.indptr[u])

    def neighbors(self, u: int) -> np.ndarray:
        return self.nbrs[self.indptr[u]:self.indptr[u + 1]]

    def out_arcs(self, u: int) -> range:
        """Arc ids leaving u (equal to incoming arcs' reverses)."""
        return range(int(self.indptr[u]), int(self.indptr[u + 1]))

    def in_arcs(self, u: int) -> np.ndarray:
        """Arc ids entering u, ordered by tail vertex."""
        return self.rev[self.indptr[u]:self.indptr[u + 1]]

    def arc_id(self, u: int, v: int) -> int:
        """Dense id of arc (u -> v); raises if the edge does not exist."""
        lo, hi = int(self.indptr[u]), int(self.indptr[u + 1])
        pos = lo + int(np.searchsorted(self.nbrs[lo:hi], v))
        if pos >= hi or self.nbrs[pos] != v:
            raise ValueError(f"no arc ({u} -> {v})")
        return pos

    def has_edge(self, u: int, v: int) -> bool:
        lo, hi = int(self.indptr[u]), int(self.indptr[u + 1])
        pos = lo + int(np.searchsorted(self.nbrs[lo:hi], v))
        return pos < hi and self.nbrs[pos] == v

    def edge_id(self, u: int, v: int) -> int:
        return int(self.arc_edge[self.arc_id(u, v)])

    # -- construction ----------------------------------------------------

    @classmethod
    def from_edges(cls, labels: list[str], pairs: list[tuple[int, int]]) -> "Graph":
        """Build from dense-index endpoint pairs (duplicates already removed)."""
        n = len(labels)
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in pairs:
            adj[u].append(v)
            adj[v].append(u)
        indptr = np.zeros(n + 1, dtype=np.int64)
        for u in range(n):
            adj[u].sort()
            indptr[u + 1] = indptr[u] + len(adj[u])
        nbrs = np.fromiter(
            (v for row in adj for v in row), dtype=np.int32, count=int(indptr[-1])
        )
        edges = np.array(
            sorted((min(u, v), max(u, v)) for u, v in pairs), dtype=np.int32
        ).reshape(len(pairs), 2)
        return cls(labels=labels, indptr=indptr, nbrs=nbrs, edges=edges)

    def export_edge_list(self) -> str:
        """One 'u v' line per edge using original labels."""
        lines = [
            f"{self.labels[int(u)]} {self.labels[int(v)]}" for u, v in self.edges
        ]
        return "\n".join(lines) + ("\n" if lines else "")


def parse_edge_list(text: str | bytes) -> Graph:
    """Parse line-oriented edge-list text into a Graph.

    Each non-comment line holds two whitespace-separated endpoint labels.
    Labels map to dense indices in first-appearance order. Duplicate edges
    (in either orientation) collapse to one edge with a logged warning;
    self-loops are rejected.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    labels: list[str] = []
    index: dict[str, int] = {}
    seen: set[tuple[int, int]] = set()
    pairs: list[tuple[int, int]] = []
    duplicates = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListParseError(
                f"line {lineno}: expected 2 tokens, got {len(tokens)}: {line!r}"
            )
        a, b = tokens
        if a == b:
            raise EdgeListParseError(f"line {lineno}: self-loop on {a!r} rejected")
        for lab in (a, b):
            if lab not in index:
                index[lab] = len(labels)
                labels.append(lab)
        u, v = index[a], index[b]
        key = (min(u, v), max(u, v))
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        pairs.append(key)
    if duplicates:
        log.warning("collapsed %d duplicate edge line(s)", duplicates)
    return Graph.from_edges(labels, pairs)


def _component_of(g: Graph, start: int, unvisited: np.ndarray) -> list[int]:
    comp = [start]
    unvisited[start] = False
    stack = [start]
    while stack:
        u = stack.pop()
        for v in g.neighbors(u):
            if unvisited[v]:
                unvisited[v] = False
                comp.append(int(v))
                stack.append(int(v))
    return comp


def largest_component(g: Graph) -> Graph:
    """Induced subgraph on the largest connected component.

    Ties break toward the component containing the smallest vertex index.
    """
    if g.vertex_count == 0:
        return g
    unvisited = np.ones(g.vertex_count, dtype=bool)
    best: list[int] = []
    for s in range(g.vertex_count):
        if unvisited[s]:
            comp = _component_of(g, s, unvisited)
            if len(comp) > len(best):
                best = comp
    return induced_subgraph(g, best)


def induced_subgraph(g: Graph, s) -> Graph:
    """Subgraph keeping exactly the edges with both endpoints in s."""
    vs = sorted(set(int(v) for v in s))
    for v in vs:
        if v < 0 or v >= g.vertex_count:
            raise ValueError(f"vertex {v} not in graph")
    remap = {v: i for i, v in enumerate(vs)}
    labels = [g.labels[v] for v in vs]
    pairs = []
    for u, v in g.edges:
        u, v = int(u), int(v)
        if u in remap and v in remap:
            pairs.append((remap[u], remap[v]))
    return Graph.from_edges(labels, pairs)


def is_connected(g: Graph, s) -> bool:
    """True iff the induced subgraph on non-empty vertex set s is connected."""
    sset = set(int(v) for v in s)
    if not sset:
        raise ValueError("vertex set must be non-empty")
    for v in sset:
        if v < 0 or v >= g.vertex_count:
            raise ValueError(f"vertex {v} not in graph")
    start = min(sset)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in g.neighbors(u):
            v = int(v)
            if v in sset and v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == len(sset)
