"""Canonical text layout for TMR graphs.

The writer refuses ill-formed graphs, expands each node inline at its first
mention, renders later mentions as bare variables, indents four spaces per
nesting level, and puts one relation per line.  Parsing the output yields a
graph structurally equal to the input.
"""

from __future__ import annotations

from collections import defaultdict

from tmrkit.core.model import Edge, Literal, TmrGraph
from tmrkit.core.validate import normalize_inverse, validate

INDENT = "    "


class SerializeError(ValueError):
    """Raised when a graph cannot be rendered as text."""


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _layout(graph: TmrGraph) -> tuple[str, set[str]]:
    by_source: dict[str, list[Edge]] = defaultdict(list)
    for edge in graph.edges:
        by_source[edge.source].append(edge)
    emitted: set[str] = set()

    def node_text(var: str, depth: int) -> str:
        emitted.add(var)
        pieces = [f"({var} / {graph.nodes[var]}"]
        for edge in by_source.get(var, ()):
            if isinstance(edge.target, Literal):
                target = f'"{_escape(edge.target.text)}"'
            elif edge.target.var in emitted:
                target = edge.target.var
            else:
                target = node_text(edge.target.var, depth + 1)
            pieces.append(
                f"\n{INDENT * (depth + 1)}{edge.relation.render()} {target}"
            )
        pieces.append(")")
        return "".join(pieces)

    return node_text(graph.root, 0), emitted


def serialize_tmr(graph: TmrGraph) -> str:
    """Render a well-formed graph as canonical TMR text.

    Raises :class:`SerializeError` when the graph fails validation or no
    layout covers every node.
    """
    verdict = validate(graph)
    if not verdict.well_formed:
        listing = "; ".join(d.render() for d in verdict.defects)
        raise SerializeError(f"graph is ill-formed: {listing}")

    text, emitted = _layout(graph)
    if emitted == set(graph.nodes):
        return text

    # Inverse edges stored against the child can hide a subtree from the
    # root-first walk; the forward-oriented graph always covers it.
    normalized = normalize_inverse(graph)
    text, emitted = _layout(normalized)
    missing = set(graph.nodes) - emitted
    if missing:
        raise SerializeError(f"no layout reaches: {', '.join(sorted(missing))}")
    return text
