"""Synthetic power-law graphs and the scalability harness."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass

import numpy as np

from .discovery import METHODS, discover_iter, discover_mcg, discover_vb
from .graph import Graph
from .models import ModelReport
from .pathstats import canonical_paths_stats


@dataclass
class BenchResult:
    n: int
    m_param: int
    k: int
    seed: int
    method: str
    preprocess_seconds: float
    discover_seconds: float
    report: ModelReport

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m_param": self.m_param,
            "k": self.k,
            "seed": self.seed,
            "method": self.method,
            "preprocess_seconds": self.preprocess_seconds,
            "discover_seconds": self.discover_seconds,
            "report": self.report.to_dict(),
        }


def gen_power_law(n: int, m: int, seed: int = 0) -> Graph:
    """Preferential-attachment graph: clique on the first m vertices, then
    each new vertex picks m distinct existing vertices with probability
    proportional to current degree (uniform while all degrees are zero)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if n <= m:
        raise ValueError(f"need n > m, got n={n} m={m}")
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    deg = np.zeros(n, dtype=np.float64)
    for i, j in pairs:
        deg[i] += 1
        deg[j] += 1
    for v in range(m, n):
        total = deg[:v].sum()
        if total > 0:
            p = deg[:v] / total
            targets = rng.choice(v, size=m, replace=False, p=p)
        else:
            targets = rng.choice(v, size=m, replace=False)
        for t in targets:
            t = int(t)
            pairs.append((t, v))
            deg[t] += 1
            deg[v] += 1
    return Graph.from_edges([str(i) for i in range(n)], pairs)


def run_bench(
    sizes: list[int],
    m: int,
    k: int,
    methods: list[str],
    seed: int = 0,
    max_refine_iters: int | None = None,
) -> list[BenchResult]:
    """Generate one graph per size, preprocess it once, and time each
    requested discovery method on it.

    Refinement steps for the iter method are capped (default k // 10 per
    restart) so bench runs stay proportional to the other methods.
    """
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
    if max_refine_iters is None:
        max_refine_iters = max(1, k // 10)
    results: list[BenchResult] = []
    for n in sizes:
        if n < k:
            raise ValueError(f"size {n} smaller than K={k}")
        g = gen_power_law(n, m, seed)
        t0 = time.perf_counter()
        stats = canonical_paths_stats(g)
        pre = time.perf_counter() - t0
        for method in methods:
            t1 = time.perf_counter()
            if method == "vb":
                res = discover_vb(g, stats, k)
            elif method == "mcg":
                res = discover_mcg(g, stats, k, seed=seed)
            else:
                res = discover_iter(
                    g, stats, k, seed=seed, max_refine_iters=max_refine_iters
                )
            dt = time.perf_counter() - t1
            results.append(BenchResult(
                n=n, m_param=m, k=k, seed=seed, method=method,
                preprocess_seconds=pre, discover_seconds=dt, report=res.report,
            ))
    return results


def bench_to_json(results: list[BenchResult], indent: int = 2) -> str:
    return json.dumps([r.to_dict() for r in results], indent=indent)


CSV_FIELDS = [
    "n", "m_param", "k", "seed", "method",
    "preprocess_seconds", "discover_seconds",
    "loglik_independent", "loglik_markovian", "loglik_bimodal",
    "param_em", "param_bm", "reduction_ratio", "accuracy_ratio",
    "edge_density",
]


def bench_to_csv(results: list[BenchResult]) -> str:
    """One row per (size, method) for plotting."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in results:
        rep = r.report.to_dict()
        row = {f: rep[f] for f in CSV_FIELDS if f in rep}
        row.update(
            n=r.n, m_param=r.m_param, k=r.k, seed=r.seed, method=r.method,
            preprocess_seconds=r.preprocess_seconds,
            discover_seconds=r.discover_seconds,
        )
        writer.writerow(row)
    return buf.getvalue()
