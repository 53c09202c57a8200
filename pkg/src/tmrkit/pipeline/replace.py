"""Replace(·): integrate retrieved codes into a graph or, when the graph
text never parsed, into the raw text.
"""

from __future__ import annotations

import logging
import re

from tmrkit.core.model import (
    Concept,
    Edge,
    Literal,
    Relation,
    TmrGraph,
    classify_literal,
)
from tmrkit.core.validate import validate
from tmrkit.knowledge.types import (
    ContextGroup,
    EntityKind,
    RetrievalContext,
    fold,
    strip_diacritics,
)

log = logging.getLogger(__name__)

_CODE_LABELS = {EntityKind.GEO: "geo", EntityKind.HISCO: "hco"}


def _lemma_fold(surface: str) -> str:
    return strip_diacritics(surface).strip().lower()


def _matching_vars(graph: TmrGraph, surface: str) -> list[str]:
    """Vars whose :nam literal equals the surface after folding."""
    wanted = fold(surface)
    return [
        var
        for var in graph.nodes
        if any(fold(name) == wanted for name in graph.attribute_values(var, "nam"))
    ]


def _set_attribute(
    edges: list[Edge], var: str, label: str, value: str
) -> bool:
    """Overwrite every (var, label) literal edge; append one if none exist.

    Returns True when the edge list changed.
    """
    changed = False
    found = False
    for i, edge in enumerate(edges):
        if (
            edge.source == var
            and edge.relation.label == label
            and not edge.relation.inverted
            and isinstance(edge.target, Literal)
        ):
            found = True
            if edge.target.text != value:
                edges[i] = Edge(var, edge.relation, classify_literal(value))
                changed = True
    if not found:
        edges.append(Edge(var, Relation(label), classify_literal(value)))
        changed = True
    return changed


def _candidate_senses(group: ContextGroup) -> tuple[str | None, list[str]]:
    """The pos shared by a synset group's candidates and their senses."""
    pos: str | None = None
    senses: list[str] = []
    for candidate in group.candidates:
        parts = candidate.code.rsplit(".", 2)
        if len(parts) != 3:
            continue
        pos = candidate.pos
        senses.append(parts[2])
    return pos, senses


def replace_codes(tmr0: TmrGraph, ctx: RetrievalContext) -> TmrGraph:
    """Write each group's top candidate code into the matching node.

    Geo and Hisco groups target nodes by their ``:nam`` literal (folded
    comparison) and overwrite the ``:geo``/``:hco`` value, adding the
    attribute when absent. Synset groups rewrite a concept's sense only
    when lemma and pos match and the current sense is not among the
    candidates. Everything else is left alone.
    """
    if not validate(tmr0).well_formed:
        raise ValueError("replace_codes requires a well-formed graph")
    if ctx.empty:
        return tmr0

    edges = list(tmr0.edges)
    nodes = dict(tmr0.nodes)
    changed = False

    for group in ctx.groups:
        if group.error is not None or not group.candidates:
            continue
        if group.kind in _CODE_LABELS:
            label = _CODE_LABELS[group.kind]
            code = group.candidates[0].code
            targets = _matching_vars(tmr0, group.surface)
            if not targets:
                log.info("no node named %r; %s code skipped", group.surface, label)
                continue
            for var in targets:
                changed = _set_attribute(edges, var, label, code) or changed
        elif group.kind is EntityKind.SYNSET:
            pos, senses = _candidate_senses(group)
            if pos is None or not senses:
                continue
            wanted = _lemma_fold(group.surface)
            hit = False
            for var, token in nodes.items():
                concept = Concept.try_parse(token)
                if concept is None or concept.pos != pos:
                    continue
                if _lemma_fold(concept.lemma) != wanted:
                    continue
                hit = True
                if concept.sense not in senses:
                    nodes[var] = f"{concept.lemma}.{concept.pos}.{senses[0]}"
                    changed = True
            if not hit:
                log.info("no %s.%s concept in graph; sense skipped", wanted, pos)

    if not changed:
        return tmr0
    result = TmrGraph(tmr0.root, nodes, tuple(edges), tmr0.source_span)
    verdict = validate(result)
    if not verdict.well_formed:
        raise AssertionError(
            "replacement broke well-formedness: " + verdict.verdict
        )
    return result


_NAM_TEXT_RE = re.compile(r':nam\s+"((?:[^"\\]|\\.)+)"')


def replace_codes_text(text: str, ctx: RetrievalContext) -> str:
    """Regex fallback for graph text that does not parse.

    Only existing ``:geo``/``:hco`` values sitting between a matching
    ``:nam`` literal and its neighbours are rewritten; nothing is inserted,
    so a broken document stays broken in the same way.
    """
    if ctx.empty:
        return text
    nam_matches = list(_NAM_TEXT_RE.finditer(text))
    if not nam_matches:
        return text

    spans: list[tuple[int, int, str]] = []
    for group in ctx.groups:
        if group.kind not in _CODE_LABELS:
            continue
        if group.error is not None or not group.candidates:
            continue
        label = _CODE_LABELS[group.kind]
        code = group.candidates[0].code
        wanted = fold(group.surface)
        for i, match in enumerate(nam_matches):
            if fold(match.group(1)) != wanted:
                continue
            lo = nam_matches[i - 1].end() if i > 0 else 0
            hi = nam_matches[i + 1].start() if i + 1 < len(nam_matches) else len(text)
            value = re.compile(r":%s\s+\"((?:[^\"\\]|\\.)*)\"" % label)
            # Attributes usually trail the name; the left margin may still
            # hold the previous node's values, so it is only a fallback.
            hit = value.search(text, match.end(), hi) or value.search(
                text, lo, match.start()
            )
            if hit is None:
                log.info("no :%s near %r in raw text; skipped", label, group.surface)
                continue
            spans.append((hit.start(1), hit.end(1), code))

    spans.sort()
    out: list[str] = []
    cursor = 0
    for start, end, code in spans:
        if start < cursor:
            continue
        out.append(text[cursor:start])
        out.append(code)
        cursor = end
    out.append(text[cursor:])
    return "".join(out)


__all__ = ["replace_codes", "replace_codes_text"]
