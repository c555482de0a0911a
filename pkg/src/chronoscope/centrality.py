"""Ten centrality measures on a weighted directed snapshot.

The suite runs on the subgraph induced by an explicit node set (a study
typically restricts to a fixed population, e.g. the universities under
comparison) and produces, per node: in/out degree, in/out strength,
pagerank, betweenness, closeness, harmonic closeness, and HITS hub and
authority scores.

Distances for the path-based measures treat heavier edges as shorter:
``length = 1 / weight``.  Closeness and harmonic centrality use incoming
distances, so they reward being easy to reach, in line with the in-strength
and in-degree reading of prominence.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from heapq import heappop, heappush
from itertools import count
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse

from .errors import ConvergenceFailure, EmptyFilter
from .snapshot import YearSnapshot

MEASURES = (
    "in_degree",
    "out_degree",
    "in_strength",
    "out_strength",
    "pagerank",
    "betweenness",
    "closeness",
    "harmonic",
    "hub",
    "authority",
)

INVERSE_WEIGHT = "inverse-weight"
UNIT = "unit"

PAGERANK_DAMPING = 0.85
PAGERANK_TOL = 1e-12
PAGERANK_MAX_ITER = 200
HITS_TOL = 1e-12
HITS_MAX_ITER = 1000


@dataclass(frozen=True)
class CentralityTable:
    """Per-node values of the ten measures for one snapshot year."""

    year: int
    nodes: tuple[str, ...]
    values: Mapping[str, Mapping[str, float]]

    def measure(self, name: str) -> Mapping[str, float]:
        return self.values[name]

    def rank_vector(self, name: str) -> tuple[str, ...]:
        """Nodes ordered most-central first; ties break on node name."""
        vals = self.values[name]
        return tuple(sorted(self.nodes, key=lambda n: (-vals[n], n)))


def centrality_suite(
    snapshot: YearSnapshot,
    node_filter: Iterable[str],
    edge_length: str = INVERSE_WEIGHT,
) -> CentralityTable:
    """Compute all ten measures on the induced subgraph.

    Pagerank uses damping 0.85, uniform redistribution of dangling mass,
    and stops when the L1 change drops below 1e-12 (ConvergenceFailure
    after 200 iterations).  ``edge_length`` switches the path-based
    measures between 1/weight and unit lengths.
    """
    nodes = tuple(sorted(set(node_filter)))
    if not nodes:
        raise EmptyFilter("node filter is empty")
    if edge_length not in (INVERSE_WEIGHT, UNIT):
        raise ValueError(f"unknown edge length mode {edge_length!r}")
    index = {node: i for i, node in enumerate(nodes)}
    n = len(nodes)

    rows, cols, weights = [], [], []
    for (src, tgt), weight in snapshot.edges.items():
        si, ti = index.get(src), index.get(tgt)
        if si is None or ti is None:
            continue
        rows.append(si)
        cols.append(ti)
        weights.append(weight)
    adjacency = sparse.csr_array(
        (np.asarray(weights, dtype=float), (rows, cols)), shape=(n, n)
    )

    out_strength = adjacency.sum(axis=1)
    in_strength = adjacency.sum(axis=0)
    binary = adjacency.copy()
    binary.data[:] = 1.0
    out_degree = binary.sum(axis=1)
    in_degree = binary.sum(axis=0)

    pagerank = _pagerank(adjacency, out_strength)
    hub, authority = _hits(adjacency)

    length_adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for si, ti, weight in zip(rows, cols, weights):
        length = 1.0 / weight if edge_length == INVERSE_WEIGHT else 1.0
        length_adj[si].append((ti, length))
    for neighbours in length_adj:
        neighbours.sort()
    betweenness, closeness, harmonic = _path_measures(length_adj, n)

    columns = {
        "in_degree": in_degree,
        "out_degree": out_degree,
        "in_strength": in_strength,
        "out_strength": out_strength,
        "pagerank": pagerank,
        "betweenness": betweenness,
        "closeness": closeness,
        "harmonic": harmonic,
        "hub": hub,
        "authority": authority,
    }
    values = {
        name: {node: float(col[i]) for i, node in enumerate(nodes)}
        for name, col in columns.items()
    }
    return CentralityTable(snapshot.year, nodes, values)


def _pagerank(adjacency: sparse.csr_array, out_strength: np.ndarray) -> np.ndarray:
    n = adjacency.shape[0]
    dangling = out_strength == 0.0
    # row-stochastic transitions for non-dangling rows
    scale = np.where(dangling, 1.0, out_strength)
    transition = sparse.csr_array(adjacency / scale[:, None])
    x = np.full(n, 1.0 / n)
    d = PAGERANK_DAMPING
    for _ in range(PAGERANK_MAX_ITER):
        spread = x @ transition
        dangling_mass = x[dangling].sum()
        new = d * spread + (d * dangling_mass + (1.0 - d)) / n
        if np.abs(new - x).sum() < PAGERANK_TOL:
            return new
        x = new
    raise ConvergenceFailure(
        f"pagerank did not converge within {PAGERANK_MAX_ITER} iterations"
    )


def _hits(adjacency: sparse.csr_array) -> tuple[np.ndarray, np.ndarray]:
    n = adjacency.shape[0]
    if adjacency.nnz == 0:
        zero = np.zeros(n)
        return zero, zero.copy()
    hub = np.full(n, 1.0 / n)
    authority = np.full(n, 1.0 / n)
    for _ in range(HITS_MAX_ITER):
        new_authority = hub @ adjacency
        new_authority /= new_authority.sum()
        new_hub = adjacency @ new_authority
        new_hub /= new_hub.sum()
        change = np.abs(new_hub - hub).sum() + np.abs(new_authority - authority).sum()
        hub, authority = new_hub, new_authority
        if change < HITS_TOL:
            return hub, authority
    raise ConvergenceFailure(
        f"HITS did not converge within {HITS_MAX_ITER} iterations"
    )


def _path_measures(
    adj: list[list[tuple[int, float]]], n: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Betweenness (Brandes), plus incoming closeness and harmonic scores.

    One Dijkstra pass per source provides the shortest-path DAG for the
    betweenness accumulation and the distances d(source -> v) that feed the
    incoming-distance measures of every target v.
    """
    betweenness = np.zeros(n)
    reach_in = np.zeros(n, dtype=int)
    dist_in = np.zeros(n)
    harmonic = np.zeros(n)
    for source in range(n):
        order, dist, sigma, preds = _shortest_path_dag(adj, source)
        for v in order:
            if v != source:
                d = dist[v]
                reach_in[v] += 1
                dist_in[v] += d
                harmonic[v] += 1.0 / d if d > 0 else 0.0
        delta = dict.fromkeys(order, 0.0)
        while order:
            w = order.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != source:
                betweenness[w] += delta[w]
    closeness = np.zeros(n)
    if n > 1:
        nonzero = dist_in > 0
        closeness[nonzero] = (reach_in[nonzero] / (n - 1)) * (
            reach_in[nonzero] / dist_in[nonzero]
        )
    return betweenness, closeness, harmonic


def _shortest_path_dag(adj, source):
    # Dijkstra that also counts shortest paths and records predecessors
    dist: dict[int, float] = {}
    seen = {source: 0.0}
    sigma = {source: 1.0}
    preds: dict[int, list[int]] = {source: []}
    order: list[int] = []
    tie = count()
    heap = [(0.0, next(tie), source, source)]
    while heap:
        d, _, pred, v = heappop(heap)
        if v in dist:
            continue
        sigma[v] += sigma[pred] if v != source else 0.0
        dist[v] = d
        order.append(v)
        for w, length in adj[v]:
            vw = d + length
            if w not in dist and (w not in seen or vw < seen[w]):
                seen[w] = vw
                sigma[w] = 0.0
                preds[w] = [v]
                heappush(heap, (vw, next(tie), v, w))
            elif vw == seen.get(w):
                sigma[w] += sigma[v]
                preds[w].append(v)
    return order, dist, sigma, preds


def write_centrality(table: CentralityTable, path) -> None:
    """Emit ``centrality_<year>.csv``: node plus the ten measure columns."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node", *MEASURES])
        for node in table.nodes:
            row = [node]
            for name in MEASURES:
                value = table.values[name][node]
                row.append(int(value) if name.endswith("degree") else repr(value))
            writer.writerow(row)
