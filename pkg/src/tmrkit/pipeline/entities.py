"""Entity extraction E(·): from a backend reply about an image, from an
initial graph, or (as a last resort) from unparseable graph text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from tmrkit.core.model import Concept, NodeRef, TmrGraph
from tmrkit.core.validate import normalize_inverse, validate
from tmrkit.knowledge.types import Entity, EntityKind, fold
from tmrkit.pipeline.prompts import build_extraction_prompt

# Relations whose target node names a place, and whose target names an
# occupation holder.
GEO_RELS = frozenset({"loc", "pob", "pod"})
OCC_RELS = frozenset({"occ"})


class ExtractionSource(str, Enum):
    IMAGE = "image"
    INITIAL_TMR = "initial-tmr"
    RAW_TEXT = "raw-text"


@dataclass(frozen=True)
class EntityExtraction:
    source: ExtractionSource
    entities: tuple[Entity, ...]
    warnings: tuple[str, ...] = ()


_IMAGE_KINDS = {"GEO": EntityKind.GEO, "HISCO": EntityKind.HISCO}


def parse_entity_reply(reply: str) -> tuple[tuple[Entity, ...], tuple[str, ...]]:
    """Parse `KIND<TAB>SURFACE` lines; anything else becomes a warning."""
    entities: list[Entity] = []
    warnings: list[str] = []
    seen: set[tuple[EntityKind, str]] = set()
    for number, raw in enumerate(reply.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split("\t")
        kind = _IMAGE_KINDS.get(parts[0].strip().upper()) if len(parts) == 2 else None
        surface = parts[1].strip() if len(parts) == 2 else ""
        if kind is None or not surface:
            warnings.append(f"dropped line {number}: {line!r}")
            continue
        key = (kind, fold(surface))
        if key in seen:
            continue
        seen.add(key)
        entities.append(Entity(surface, kind))
    return tuple(entities), tuple(warnings)


def extract_entities_from_image(image: str, backend) -> EntityExtraction:
    """Ask the backend which place names and occupations the image shows."""
    prompt = build_extraction_prompt(image)
    reply = backend.generate(prompt)
    entities, warnings = parse_entity_reply(reply)
    return EntityExtraction(ExtractionSource.IMAGE, entities, warnings)


def _names_of(graph: TmrGraph, var: str) -> list[str]:
    return graph.attribute_values(var, "nam")


def extract_entities_from_tmr(tmr0: TmrGraph) -> EntityExtraction:
    """Read entities off an initial graph.

    Place names are `:nam` literals on nodes that carry a `:geo` attribute
    or hang off `:loc`/`:pob`/`:pod`; occupations are `:nam` literals on
    nodes reached via `:occ` or carrying `:hco`; every parseable concept
    contributes its lemma and pos for sense lookup.
    """
    if not validate(tmr0).well_formed:
        return EntityExtraction(
            ExtractionSource.INITIAL_TMR,
            (),
            ("initial graph is ill-formed; nothing extracted",),
        )
    graph = normalize_inverse(tmr0)

    geo_vars: set[str] = set()
    occ_vars: set[str] = set()
    for var in graph.nodes:
        if graph.attribute_values(var, "geo"):
            geo_vars.add(var)
        if graph.attribute_values(var, "hco"):
            occ_vars.add(var)
    for edge in graph.edges:
        if not isinstance(edge.target, NodeRef):
            continue
        if edge.relation.label in GEO_RELS:
            geo_vars.add(edge.target.var)
        elif edge.relation.label in OCC_RELS:
            occ_vars.add(edge.target.var)

    entities: list[Entity] = []
    seen: set[tuple[EntityKind, str, str | None]] = set()

    def push(entity: Entity) -> None:
        key = (entity.kind, fold(entity.surface), entity.pos)
        if key not in seen:
            seen.add(key)
            entities.append(entity)

    for var in graph.nodes:
        if var in geo_vars:
            for name in _names_of(graph, var):
                push(Entity(name, EntityKind.GEO))
    for var in graph.nodes:
        if var in occ_vars:
            for name in _names_of(graph, var):
                push(Entity(name, EntityKind.HISCO))
    for var, token in graph.nodes.items():
        concept = Concept.try_parse(token)
        if concept is not None:
            push(Entity(concept.lemma, EntityKind.SYNSET, pos=concept.pos))
    return EntityExtraction(ExtractionSource.INITIAL_TMR, tuple(entities))


_NAM_TEXT_RE = re.compile(r':nam\s+"((?:[^"\\]|\\.)+)"')


def extract_entities_from_text(text: str) -> EntityExtraction:
    """Pull `:nam` surfaces out of graph text that would not parse.

    Without a graph there is no way to tell places from occupations, so
    each surface is queried as both; lookups that find nothing stay empty.
    """
    entities: list[Entity] = []
    seen: set[str] = set()
    for match in _NAM_TEXT_RE.finditer(text):
        surface = match.group(1)
        key = fold(surface)
        if key in seen:
            continue
        seen.add(key)
        entities.append(Entity(surface, EntityKind.GEO))
        entities.append(Entity(surface, EntityKind.HISCO))
    return EntityExtraction(
        ExtractionSource.RAW_TEXT,
        tuple(entities),
        ("entities recovered from unparsed text",) if entities else (),
    )


__all__ = [
    "EntityExtraction",
    "ExtractionSource",
    "GEO_RELS",
    "OCC_RELS",
    "extract_entities_from_image",
    "extract_entities_from_text",
    "extract_entities_from_tmr",
    "parse_entity_reply",
]
