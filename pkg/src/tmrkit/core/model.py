"""Data model for tombstone meaning representation (TMR) graphs.

A TMR is a rooted directed graph written in PENMAN notation.  Nodes carry a
variable name and a concept token (``lemma.pos.sense``); labelled edges
connect nodes to other nodes, to quoted literals, or back to already defined
variables (reentrancy).  Relations may be inverted with an ``-of`` suffix:
``R(x, y)`` is equivalent to ``R-of(y, x)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping

VAR_RE = re.compile(r"[a-z][0-9]+\Z")
CONCEPT_RE = re.compile(r"[a-z0-9_]+\.[nvar]\.[0-9]{2}\Z")
RELATION_LABEL_RE = re.compile(r"[a-z]{3}\Z")

POS_TAGS = ("n", "v", "a", "r")


def is_var(token: str) -> bool:
    """True if ``token`` is a variable name: one lowercase letter then digits."""
    return bool(VAR_RE.match(token))


@dataclass(frozen=True)
class Concept:
    """A sense-disambiguated concept, rendered as ``lemma.pos.sense``."""

    lemma: str
    pos: str
    sense: str

    def __post_init__(self) -> None:
        if not CONCEPT_RE.match(self.render()):
            raise ValueError(f"malformed concept: {self.render()!r}")

    def render(self) -> str:
        return f"{self.lemma}.{self.pos}.{self.sense}"

    @classmethod
    def parse(cls, token: str) -> Concept:
        """Parse ``lemma.pos.sense``; raises ValueError on malformed tokens."""
        if not CONCEPT_RE.match(token):
            raise ValueError(f"malformed concept: {token!r}")
        lemma, pos, sense = token.rsplit(".", 2)
        return cls(lemma, pos, sense)

    @classmethod
    def try_parse(cls, token: str) -> Concept | None:
        if not CONCEPT_RE.match(token):
            return None
        lemma, pos, sense = token.rsplit(".", 2)
        return cls(lemma, pos, sense)


@dataclass(frozen=True)
class Relation:
    """An edge label: three lowercase letters, optionally inverted (``-of``)."""

    label: str
    inverted: bool = False

    def render(self) -> str:
        return f":{self.label}-of" if self.inverted else f":{self.label}"

    @classmethod
    def from_token(cls, token: str) -> Relation:
        """Build from a lexer token including the leading colon."""
        body = token[1:]
        if body.endswith("-of"):
            return cls(body[: -len("-of")], inverted=True)
        return cls(body)

    @property
    def label_ok(self) -> bool:
        return bool(RELATION_LABEL_RE.match(self.label))


@dataclass(frozen=True)
class NodeRef:
    """Edge target referring to a variable defined elsewhere in the graph."""

    var: str


@dataclass(frozen=True)
class Literal:
    """Quoted string payload; interior whitespace and case are preserved."""

    text: str


@dataclass(frozen=True)
class DateLiteral(Literal):
    """A literal whose content is digits and date punctuation only.

    Parsed and serialized identically to :class:`Literal`; the subclass only
    records which surface class the token fell into.
    """


EdgeTarget = NodeRef | Literal


_DATE_CHARS = set("0123456789./-:")


def classify_literal(text: str) -> Literal:
    """Return a DateLiteral for digit/punctuation payloads, else a Literal."""
    if text and any(c.isdigit() for c in text) and set(text) <= _DATE_CHARS:
        return DateLiteral(text)
    return Literal(text)


@dataclass(frozen=True)
class Edge:
    source: str
    relation: Relation
    target: EdgeTarget


@dataclass(frozen=True)
class TmrGraph:
    """A parsed TMR: root variable, node map, and ordered edge list.

    ``nodes`` maps each variable to its raw concept token (kept verbatim even
    when malformed so that validation can report the defect).  ``edges``
    preserves document order, which canonical serialization reuses.  Treat
    instances as immutable; all toolkit operations return new graphs.
    """

    root: str
    nodes: Mapping[str, str]
    edges: tuple[Edge, ...]
    source_span: str | None = None

    def concept(self, var: str) -> Concept | None:
        """Structured concept for ``var``, or None if absent or malformed."""
        token = self.nodes.get(var)
        if token is None:
            return None
        return Concept.try_parse(token)

    def edges_from(self, var: str) -> Iterator[Edge]:
        for edge in self.edges:
            if edge.source == var:
                yield edge

    def attribute_values(self, var: str, label: str) -> list[str]:
        """Literal payloads of non-inverted ``label`` edges out of ``var``."""
        return [
            e.target.text
            for e in self.edges
            if e.source == var
            and not e.relation.inverted
            and e.relation.label == label
            and isinstance(e.target, Literal)
        ]


class DefectKind(str, Enum):
    CYCLE = "cycle"
    ISOLATED_NODE = "isolated-node"
    DANGLING_EDGE = "dangling-edge"
    DUPLICATE_VAR = "duplicate-var"
    BAD_CONCEPT_FORMAT = "bad-concept-format"
    BAD_RELATION_FORMAT = "bad-relation-format"
    MULTIPLE_ROOTS = "multiple-roots"
    PARSE_FAILURE = "parse-failure"


@dataclass(frozen=True)
class Defect:
    kind: DefectKind
    location: str

    def render(self) -> str:
        return f"{self.kind.value}: {self.location}"


@dataclass(frozen=True)
class WellFormedness:
    """Validation verdict; ill-formed exactly when ``defects`` is non-empty."""

    defects: tuple[Defect, ...] = ()

    @property
    def well_formed(self) -> bool:
        return not self.defects

    @property
    def verdict(self) -> str:
        return "well-formed" if self.well_formed else "ill-formed"

    def kinds(self) -> set[DefectKind]:
        return {d.kind for d in self.defects}
