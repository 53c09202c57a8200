"""Triple extraction and field classification for TMR graphs.

A graph decomposes into instance triples (one per node), relation triples
(node-to-node edges), and attribute triples (node-to-literal edges).  Edges
are forward-oriented before extraction, so ``:rel-of`` never appears in a
triple.  Field classes bucket triples for per-field scoring; triples outside
every bucket still count toward the overall match score.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from tmrkit.core.model import NodeRef, TmrGraph
from tmrkit.core.validate import normalize_inverse, validate


class TripleKind(str, Enum):
    INSTANCE = "instance"
    RELATION = "relation"
    ATTRIBUTE = "attribute"


@dataclass(frozen=True)
class Triple:
    """One scored fact: instance(var, concept), rel(var, var), attr(var, text)."""

    kind: TripleKind
    relation_label: str
    source: str
    target: str

    def render(self) -> str:
        return f"{self.relation_label}({self.source}, {self.target})"


def to_triples(graph: TmrGraph) -> frozenset[Triple]:
    """Decompose a well-formed graph into its triple set.

    Attribute values are trimmed of surrounding whitespace; duplicates
    collapse under set semantics.  Raises :class:`ValueError` for an
    ill-formed graph.
    """
    verdict = validate(graph)
    if not verdict.well_formed:
        listing = "; ".join(d.render() for d in verdict.defects)
        raise ValueError(f"cannot extract triples from ill-formed graph: {listing}")

    flat = normalize_inverse(graph)
    triples: set[Triple] = set()
    for var, token in flat.nodes.items():
        triples.add(Triple(TripleKind.INSTANCE, "instance", var, token))
    for edge in flat.edges:
        if isinstance(edge.target, NodeRef):
            triples.add(
                Triple(TripleKind.RELATION, edge.relation.label, edge.source, edge.target.var)
            )
        else:
            triples.add(
                Triple(
                    TripleKind.ATTRIBUTE,
                    edge.relation.label,
                    edge.source,
                    edge.target.text.strip(),
                )
            )
    return frozenset(triples)


class FieldClass(str, Enum):
    NAME = "name"
    ROLE = "role"
    DATE = "date"
    GEO = "geo"
    HISCO = "hisco"
    SYNSET = "synset"


_NAME_ATTRS = frozenset({"nam", "pfx", "sfx"})
_ROLE_RELS = frozenset({"rol", "tgt", "ent"})
_DATE_ATTRS = frozenset({"dom", "moy", "yoc"})
_DATE_RELS = frozenset({"dob", "dod", "beg", "end", "bef", "aft"})


def classify_triple(triple: Triple) -> FieldClass | None:
    """Map a triple to its field class, or None when it has no bucket."""
    if triple.kind is TripleKind.INSTANCE:
        return FieldClass.SYNSET
    if triple.kind is TripleKind.ATTRIBUTE:
        if triple.relation_label in _NAME_ATTRS:
            return FieldClass.NAME
        if triple.relation_label in _DATE_ATTRS:
            return FieldClass.DATE
        if triple.relation_label == "geo":
            return FieldClass.GEO
        if triple.relation_label == "hco":
            return FieldClass.HISCO
        return None
    if triple.relation_label in _ROLE_RELS:
        return FieldClass.ROLE
    if triple.relation_label in _DATE_RELS:
        return FieldClass.DATE
    return None
