"""Well-formedness checking and inverse-edge normalization for TMR graphs.

A graph is well-formed when every node carries a valid concept token, every
relation label is valid, every edge endpoint is defined, exactly one root
exists, every node is reachable from the root, and the directed graph (after
rewriting ``:rel-of`` edges to their forward orientation) is acyclic.

Defects are reported in a fixed kind order so callers can rely on the first
entry being the most fundamental problem.
"""

from __future__ import annotations

from collections import Counter

from tmrkit.core.model import (
    Concept,
    Defect,
    DefectKind,
    Edge,
    NodeRef,
    Relation,
    TmrGraph,
    WellFormedness,
    is_var,
)
from tmrkit.core.parser import TmrParseError, parse_document

_KIND_ORDER = (
    DefectKind.PARSE_FAILURE,
    DefectKind.DUPLICATE_VAR,
    DefectKind.BAD_CONCEPT_FORMAT,
    DefectKind.BAD_RELATION_FORMAT,
    DefectKind.DANGLING_EDGE,
    DefectKind.MULTIPLE_ROOTS,
    DefectKind.ISOLATED_NODE,
    DefectKind.CYCLE,
)


def normalize_inverse(graph: TmrGraph) -> TmrGraph:
    """Rewrite every ``:rel-of`` edge to its forward form.

    ``R-of(x, y)`` holds exactly when ``R(y, x)``, so flipping endpoints
    and dropping the marker preserves meaning.  Edge positions are kept.
    Raises :class:`ValueError` for an inverted edge with a literal target,
    which has no forward reading.
    """
    changed = False
    edges: list[Edge] = []
    for edge in graph.edges:
        if edge.relation.inverted:
            if not isinstance(edge.target, NodeRef):
                raise ValueError(
                    f"cannot normalize literal edge "
                    f"{edge.source} {edge.relation.render()}"
                )
            edges.append(
                Edge(edge.target.var, Relation(edge.relation.label), NodeRef(edge.source))
            )
            changed = True
        else:
            edges.append(edge)
    if not changed:
        return graph
    return TmrGraph(
        root=graph.root,
        nodes=graph.nodes,
        edges=tuple(edges),
        source_span=graph.source_span,
    )


def _analysis_adjacency(graph: TmrGraph) -> dict[str, list[str]]:
    """Forward-oriented node adjacency, ignoring edges validation rejects."""
    adjacency: dict[str, list[str]] = {var: [] for var in graph.nodes}
    for edge in graph.edges:
        if not isinstance(edge.target, NodeRef):
            continue
        source, target = edge.source, edge.target.var
        if edge.relation.inverted:
            source, target = target, source
        if source in adjacency and target in graph.nodes:
            adjacency[source].append(target)
    return adjacency


def _reachable(adjacency: dict[str, list[str]], root: str) -> set[str]:
    seen = {root}
    frontier = [root]
    while frontier:
        var = frontier.pop()
        for nxt in adjacency.get(var, ()):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def _cycle_defects(adjacency: dict[str, list[str]]) -> list[Defect]:
    white, gray, black = 0, 1, 2
    color = {var: white for var in adjacency}
    stack: list[str] = []
    defects: list[Defect] = []

    def visit(var: str) -> None:
        color[var] = gray
        stack.append(var)
        for nxt in adjacency[var]:
            if color[nxt] == gray:
                start = stack.index(nxt)
                path = stack[start:] + [nxt]
                defects.append(Defect(DefectKind.CYCLE, " -> ".join(path)))
            elif color[nxt] == white:
                visit(nxt)
        stack.pop()
        color[var] = black

    for var in adjacency:
        if color[var] == white:
            visit(var)
    return defects


def _validate_graph(
    graph: TmrGraph, pre_defects: tuple[Defect, ...] = ()
) -> WellFormedness:
    defects: list[Defect] = list(pre_defects)

    for var, token in graph.nodes.items():
        if not is_var(var):
            defects.append(
                Defect(DefectKind.BAD_CONCEPT_FORMAT, f"bad variable name {var!r}")
            )
        if Concept.try_parse(token) is None:
            defects.append(
                Defect(DefectKind.BAD_CONCEPT_FORMAT, f"{var}: {token!r}")
            )

    for edge in graph.edges:
        rendered = f"{edge.source} {edge.relation.render()}"
        if not edge.relation.label_ok:
            defects.append(
                Defect(DefectKind.BAD_RELATION_FORMAT, f"{rendered}: bad label")
            )
        if edge.relation.inverted and not isinstance(edge.target, NodeRef):
            defects.append(
                Defect(
                    DefectKind.BAD_RELATION_FORMAT,
                    f"{rendered}: inverse relation with literal target",
                )
            )

    if graph.root not in graph.nodes:
        defects.append(
            Defect(DefectKind.DANGLING_EDGE, f"root {graph.root} is not defined")
        )
    for edge in graph.edges:
        rendered = f"{edge.source} {edge.relation.render()}"
        if edge.source not in graph.nodes:
            defects.append(
                Defect(DefectKind.DANGLING_EDGE, f"{rendered}: source undefined")
            )
        if isinstance(edge.target, NodeRef) and edge.target.var not in graph.nodes:
            defects.append(
                Defect(
                    DefectKind.DANGLING_EDGE,
                    f"{rendered} {edge.target.var}: target undefined",
                )
            )

    adjacency = _analysis_adjacency(graph)
    if graph.root in graph.nodes:
        reached = _reachable(adjacency, graph.root)
        for var in graph.nodes:
            if var not in reached:
                defects.append(
                    Defect(
                        DefectKind.ISOLATED_NODE,
                        f"{var} unreachable from root {graph.root}",
                    )
                )
    defects.extend(_cycle_defects(adjacency))

    defects.sort(key=lambda d: _KIND_ORDER.index(d.kind))
    return WellFormedness(tuple(defects))


def check_tmr(text: str) -> tuple[TmrGraph | None, WellFormedness]:
    """Parse and validate text; a hard parse failure yields ``(None, ...)``."""
    try:
        outcome = parse_document(text)
    except TmrParseError as exc:
        defect = Defect(DefectKind.PARSE_FAILURE, str(exc))
        return None, WellFormedness((defect,))
    return outcome.graph, _validate_graph(outcome.graph, outcome.defects)


def validate(tmr: TmrGraph | str) -> WellFormedness:
    """Return the well-formedness verdict for a graph or for raw text."""
    if isinstance(tmr, str):
        return check_tmr(tmr)[1]
    return _validate_graph(tmr)


def _edge_key(edge: Edge) -> tuple[str, str, tuple[str, str]]:
    relation = edge.relation
    if isinstance(edge.target, NodeRef):
        if relation.inverted:
            return (edge.target.var, relation.label, ("var", edge.source))
        return (edge.source, relation.label, ("var", edge.target.var))
    label = relation.label + "-of" if relation.inverted else relation.label
    return (edge.source, label, ("lit", edge.target.text))


def structurally_equal(a: TmrGraph, b: TmrGraph) -> bool:
    """True when both graphs carry the same nodes and normalized edges.

    Edge order, inverse orientation, and literal subclassing are not
    significant; variable names are.
    """
    if a.root != b.root or dict(a.nodes) != dict(b.nodes):
        return False
    return Counter(map(_edge_key, a.edges)) == Counter(map(_edge_key, b.edges))
