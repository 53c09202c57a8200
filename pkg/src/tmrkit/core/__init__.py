"""Data model, parser, validator, and canonical writer for TMR graphs."""

from tmrkit.core.model import (
    Concept,
    DateLiteral,
    Defect,
    DefectKind,
    Edge,
    EdgeTarget,
    Literal,
    NodeRef,
    Relation,
    TmrGraph,
    WellFormedness,
    classify_literal,
    is_var,
)
from tmrkit.core.parser import ParseOutcome, TmrParseError, parse_document, parse_tmr
from tmrkit.core.serialize import SerializeError, serialize_tmr
from tmrkit.core.validate import (
    check_tmr,
    normalize_inverse,
    structurally_equal,
    validate,
)

__all__ = [
    "Concept",
    "DateLiteral",
    "Defect",
    "DefectKind",
    "Edge",
    "EdgeTarget",
    "Literal",
    "NodeRef",
    "ParseOutcome",
    "Relation",
    "SerializeError",
    "TmrGraph",
    "TmrParseError",
    "WellFormedness",
    "check_tmr",
    "classify_literal",
    "is_var",
    "normalize_inverse",
    "parse_document",
    "parse_tmr",
    "serialize_tmr",
    "structurally_equal",
    "validate",
]
