"""Descriptive statistics of snapshots at the second-level-domain grain.

These back the overview plots of a longitudinal domain study: how many
third-level domains each SLD holds per year, each SLD's share of the total,
within-SLD links per node, and the SLD-to-SLD flow matrix in absolute and
target-size-normalized form.  Nodes whose suffix is not registered in the
policy aggregate under the synthetic ``other`` bucket instead of erroring.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Mapping

from .domains import SuffixPolicy, sld_label
from .errors import UnknownSld
from .snapshot import YearSnapshot


@dataclass(frozen=True)
class SldYearStats:
    """Node counts and shares per SLD for one year."""

    year: int
    counts: Mapping[str, int]
    shares: Mapping[str, float]
    total_nodes: int

    @property
    def empty(self) -> bool:
        # shares are reported as 0 rather than undefined in this case
        return self.total_nodes == 0


@dataclass(frozen=True)
class SldFlowMatrix:
    """Inter-SLD link totals for one year.

    ``absolute`` sums edge weights per (source SLD, target SLD); when built
    with ``include_self=False`` the diagonal is omitted from the absolute
    view but kept in the normalized one, which divides each cell by the
    target SLD's node count.  SLDs without nodes normalize to 0 and are
    listed in ``zero_node_slds``.
    """

    year: int
    absolute: Mapping[tuple[str, str], int]
    normalized: Mapping[tuple[str, str], float]
    node_counts: Mapping[str, int]
    include_self: bool
    zero_node_slds: frozenset[str] = frozenset()


def node_counts_by_sld(snapshot: YearSnapshot, policy: SuffixPolicy) -> SldYearStats:
    """Count third-level domains per SLD and their shares of the total.

    A node is anything that appears as an edge endpoint or in the node-pages
    data.  Shares over all SLDs sum to 1 whenever any node exists.
    """
    counts: dict[str, int] = {}
    for node in snapshot.nodes():
        sld = sld_label(node, policy)
        counts[sld] = counts.get(sld, 0) + 1
    total = sum(counts.values())
    shares = {
        sld: (count / total if total else 0.0) for sld, count in counts.items()
    }
    return SldYearStats(snapshot.year, counts, shares, total)


def within_sld_links_per_node(
    snapshot: YearSnapshot,
    sld: str,
    policy: SuffixPolicy,
    distinct: bool = False,
) -> float:
    """Weight of links staying inside one SLD, per node of that SLD.

    ``distinct`` counts edges instead of summing their weights.  Returns 0
    for an SLD without nodes.
    """
    if sld not in policy.registered_slds:
        raise UnknownSld(f"{sld!r} is not registered in the policy")
    nodes = sum(1 for node in snapshot.nodes() if sld_label(node, policy) == sld)
    if nodes == 0:
        return 0.0
    internal = 0
    for (src, tgt), weight in snapshot.edges.items():
        if sld_label(src, policy) == sld and sld_label(tgt, policy) == sld:
            internal += 1 if distinct else weight
    return internal / nodes


def inter_sld_flows(
    snapshot: YearSnapshot, policy: SuffixPolicy, include_self: bool = False
) -> SldFlowMatrix:
    """Aggregate edge weights into the SLD-to-SLD flow matrix.

    With ``include_self=True`` the absolute matrix total equals the
    snapshot's total edge weight exactly.
    """
    stats = node_counts_by_sld(snapshot, policy)
    totals: dict[tuple[str, str], int] = {}
    for (src, tgt), weight in snapshot.edges.items():
        cell = (sld_label(src, policy), sld_label(tgt, policy))
        totals[cell] = totals.get(cell, 0) + weight
    zero_nodes = set()
    normalized: dict[tuple[str, str], float] = {}
    for (src_sld, tgt_sld), total in totals.items():
        nodes = stats.counts.get(tgt_sld, 0)
        if nodes == 0:
            zero_nodes.add(tgt_sld)
            normalized[(src_sld, tgt_sld)] = 0.0
        else:
            normalized[(src_sld, tgt_sld)] = total / nodes
    absolute = {
        cell: total
        for cell, total in totals.items()
        if include_self or cell[0] != cell[1]
    }
    return SldFlowMatrix(
        snapshot.year,
        absolute,
        normalized,
        stats.counts,
        include_self,
        frozenset(zero_nodes),
    )


def write_sld_series(rows: Iterable[SldYearStats], path) -> None:
    """Emit ``sld_series.csv``: year,sld,node_count,share."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["year", "sld", "node_count", "share"])
        for stats in sorted(rows, key=lambda s: s.year):
            for sld in sorted(stats.counts):
                writer.writerow(
                    [stats.year, sld, stats.counts[sld], repr(stats.shares[sld])]
                )


def write_links_per_node(
    per_year: Mapping[int, Mapping[str, float]], path
) -> None:
    """Emit ``links_per_node.csv``: year,sld,links_per_node."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["year", "sld", "links_per_node"])
        for year in sorted(per_year):
            for sld in sorted(per_year[year]):
                writer.writerow([year, sld, repr(per_year[year][sld])])


def write_flows(matrix: SldFlowMatrix, path) -> None:
    """Emit ``flows_<year>.csv``: source_sld,target_sld,absolute,normalized.

    Cells dropped from the absolute view (the diagonal when self-flows are
    excluded) keep their normalized value and leave the absolute field
    empty.
    """
    cells = sorted(set(matrix.absolute) | set(matrix.normalized))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source_sld", "target_sld", "absolute", "normalized"])
        for cell in cells:
            absolute = matrix.absolute.get(cell, "")
            writer.writerow(
                [cell[0], cell[1], absolute, repr(matrix.normalized[cell])]
            )
