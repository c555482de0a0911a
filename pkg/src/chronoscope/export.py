"""GraphML export of snapshots for network-diagram tooling."""

from __future__ import annotations

from typing import Iterable
from xml.sax.saxutils import escape, quoteattr

from .snapshot import YearSnapshot


def write_graphml(
    snapshot: YearSnapshot, path, node_filter: Iterable[str] | None = None
) -> None:
    """Write the (optionally induced) snapshot as a directed GraphML graph.

    Nodes and edges are emitted sorted, so equal snapshots produce
    byte-identical files.  Edge weights travel as a ``weight`` attribute.
    """
    graph = snapshot if node_filter is None else snapshot.induced(node_filter)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write('<?xml version="1.0" encoding="UTF-8"?>\n')
        fh.write('<graphml xmlns="http://graphml.graphdrawing.org/xmlns">\n')
        fh.write(
            '  <key id="weight" for="edge" attr.name="weight" attr.type="long"/>\n'
        )
        fh.write(f'  <graph id="year_{graph.year}" edgedefault="directed">\n')
        for node in sorted(graph.nodes()):
            fh.write(f"    <node id={quoteattr(node)}/>\n")
        for (src, tgt) in sorted(graph.edges):
            weight = graph.edges[(src, tgt)]
            fh.write(
                f"    <edge source={quoteattr(src)} target={quoteattr(tgt)}>"
                f'<data key="weight">{escape(str(weight))}</data></edge>\n'
            )
        fh.write("  </graph>\n")
        fh.write("</graphml>\n")
