"""Rank correlation, partition modularity, and group link density.

These compare a snapshot's link structure against outside information:
league-table ranks, institutional affiliations, and membership lists.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .centrality import MEASURES, CentralityTable
from .errors import (
    DegenerateInput,
    EmptyGraph,
    InsufficientOverlap,
    LengthMismatch,
    MalformedLine,
    TooFewMembers,
)
from .snapshot import YearSnapshot

# nodes missing from a partition mapping form one implicit group
UNAFFILIATED = "unaffiliated"


def fractional_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks, smallest value first, ties sharing their average rank."""
    v = np.asarray(values, dtype=float)
    ordered = np.sort(v)
    left = np.searchsorted(ordered, v, side="left")
    right = np.searchsorted(ordered, v, side="right")
    return (left + right + 1) / 2.0


def spearman_rank_correlation(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman's coefficient: Pearson correlation of fractional ranks.

    The rank-then-correlate form stays correct under ties, unlike the
    classic 6*sum(d^2) shortcut.
    """
    if len(xs) != len(ys):
        raise LengthMismatch(f"{len(xs)} values vs {len(ys)}")
    if len(xs) < 2:
        raise DegenerateInput("need at least two paired values")
    rx = fractional_ranks(xs)
    ry = fractional_ranks(ys)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sx = float(dx @ dx)
    sy = float(dy @ dy)
    if sx == 0.0 or sy == 0.0:
        raise DegenerateInput("constant input has no rank ordering")
    return float(dx @ dy) / math.sqrt(sx * sy)


@dataclass(frozen=True)
class RankingTable:
    """External integer ranking of nodes, 1 = best; ties allowed."""

    ranks: Mapping[str, int]
    year: int | None = None


@dataclass(frozen=True)
class LeagueCorrelation:
    """Per-measure Spearman coefficients against a league ranking."""

    year: int
    n_overlap: int
    dropped_from_table: int
    dropped_from_ranking: int
    rho: Mapping[str, float]


def rank_centrality_vs_league(
    table: CentralityTable, ranking: RankingTable
) -> LeagueCorrelation:
    """Correlate every centrality measure against league rank.

    Nodes missing from either side are dropped and counted.  The sign
    convention makes "more central goes with better-ranked" positive: nodes
    are ranked most-central-first and correlated against the league rank,
    where 1 is best.  A measure that is constant on the overlap (common for
    betweenness on sparse graphs) gets ``nan``.
    """
    common = sorted(set(table.nodes) & set(ranking.ranks))
    if len(common) < 2:
        raise InsufficientOverlap(f"only {len(common)} nodes on both sides")
    league = [ranking.ranks[node] for node in common]
    rho: dict[str, float] = {}
    for name in MEASURES:
        values = table.values[name]
        centrality_desc = [-values[node] for node in common]
        try:
            rho[name] = spearman_rank_correlation(centrality_desc, league)
        except DegenerateInput:
            rho[name] = math.nan
    return LeagueCorrelation(
        table.year,
        len(common),
        len(table.nodes) - len(common),
        len(ranking.ranks) - len(common),
        rho,
    )


@dataclass(frozen=True)
class GroupWeights:
    internal_weight: int
    expected_weight: float


@dataclass(frozen=True)
class ModularityResult:
    """Directed weighted modularity of a given node partition."""

    q: float
    total_weight: int
    groups: Mapping[str, GroupWeights]


def modularity(
    snapshot: YearSnapshot,
    partition: Mapping[str, str],
    node_filter: Iterable[str] | None = None,
) -> ModularityResult:
    """Q = (1/m) * sum_ij [A_ij - s_i_out * s_j_in / m] * [c_i == c_j].

    Computed on the subgraph induced by ``node_filter`` (all snapshot nodes
    when omitted) with edge weights as A.  Nodes outside the partition
    mapping share the implicit "unaffiliated" group.  The double sum
    collapses to per-group totals, evaluated in exact integer arithmetic up
    to the final division.
    """
    nodes = sorted(node_filter) if node_filter is not None else sorted(snapshot.nodes())
    keep = set(nodes)
    group_of = {node: partition.get(node, UNAFFILIATED) for node in nodes}

    m = 0
    internal: dict[str, int] = {}
    s_out: dict[str, int] = {}
    s_in: dict[str, int] = {}
    for (src, tgt), weight in snapshot.edges.items():
        if src not in keep or tgt not in keep:
            continue
        m += weight
        s_out[src] = s_out.get(src, 0) + weight
        s_in[tgt] = s_in.get(tgt, 0) + weight
        if group_of[src] == group_of[tgt]:
            group = group_of[src]
            internal[group] = internal.get(group, 0) + weight
    if m == 0:
        raise EmptyGraph("induced subgraph has no edge weight")

    groups: dict[str, GroupWeights] = {}
    internal_total = 0
    expected_total = 0  # sum of S_out(g) * S_in(g), still integer
    for group in sorted(set(group_of.values())):
        members = [node for node in nodes if group_of[node] == group]
        group_out = sum(s_out.get(node, 0) for node in members)
        group_in = sum(s_in.get(node, 0) for node in members)
        inside = internal.get(group, 0)
        internal_total += inside
        expected_total += group_out * group_in
        groups[group] = GroupWeights(inside, group_out * group_in / m)
    q = (internal_total * m - expected_total) / (m * m)
    return ModularityResult(q, m, groups)


def group_internal_density(snapshot: YearSnapshot, members: Iterable[str]) -> float:
    """Fraction of ordered member pairs joined by at least one link.

    Presence-only by construction: edge weights never matter.
    """
    member_set = set(members)
    k = len(member_set)
    if k < 2:
        raise TooFewMembers(f"need at least 2 members, got {k}")
    linked = sum(
        1
        for (src, tgt) in snapshot.edges
        if src in member_set and tgt in member_set
    )
    return linked / (k * (k - 1))


# --- input files ---

def read_partition(path) -> dict[str, str]:
    """Read ``third_level_domain<TAB>group_label`` lines."""
    mapping: dict[str, str] = {}
    for lineno, parts in _tsv_rows(path):
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise MalformedLine(f"{path}:{lineno}: expected 'domain<TAB>group'")
        mapping[parts[0]] = parts[1]
    return mapping


def read_ranking(path, year: int | None = None) -> RankingTable:
    """Read ``third_level_domain<TAB>rank_integer`` lines (1 = best)."""
    ranks: dict[str, int] = {}
    for lineno, parts in _tsv_rows(path):
        if len(parts) != 2:
            raise MalformedLine(f"{path}:{lineno}: expected 'domain<TAB>rank'")
        try:
            rank = int(parts[1])
        except ValueError:
            raise MalformedLine(f"{path}:{lineno}: bad rank {parts[1]!r}") from None
        if rank < 1:
            raise MalformedLine(f"{path}:{lineno}: ranks start at 1")
        ranks[parts[0]] = rank
    return RankingTable(ranks, year)


def read_node_list(path) -> list[str]:
    """Read a node-filter file: one third-level domain per line."""
    nodes = []
    for lineno, parts in _tsv_rows(path):
        if len(parts) != 1 or not parts[0]:
            raise MalformedLine(f"{path}:{lineno}: expected one domain per line")
        nodes.append(parts[0])
    return nodes


def _tsv_rows(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            yield lineno, line.split("\t")


# --- output files ---

def write_correlations(result: LeagueCorrelation, path) -> None:
    """Emit ``correlations_<year>.csv``: measure,rho,n_overlap."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["measure", "rho", "n_overlap"])
        for name in MEASURES:
            writer.writerow([name, repr(result.rho[name]), result.n_overlap])


def write_modularity(result: ModularityResult, path) -> None:
    """Emit ``modularity_<year>.csv``; q is repeated on each group row."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["group", "internal_weight", "expected_weight", "q"])
        for group in sorted(result.groups):
            weights = result.groups[group]
            writer.writerow(
                [
                    group,
                    weights.internal_weight,
                    repr(weights.expected_weight),
                    repr(result.q),
                ]
            )
