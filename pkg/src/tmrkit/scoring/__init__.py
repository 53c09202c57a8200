"""Triple extraction, pair match scoring, and corpus reports."""

from tmrkit.scoring.exhaustive import smatch_exhaustive
from tmrkit.scoring.report import (
    FieldCounts,
    ScoreReport,
    micro_f1,
    pair_seed,
    score_corpus,
)
from tmrkit.scoring.smatch import SmatchScore, VariableMapping, smatch_pair
from tmrkit.scoring.triples import (
    FieldClass,
    Triple,
    TripleKind,
    classify_triple,
    to_triples,
)

__all__ = [
    "FieldClass",
    "FieldCounts",
    "ScoreReport",
    "SmatchScore",
    "Triple",
    "TripleKind",
    "VariableMapping",
    "classify_triple",
    "micro_f1",
    "pair_seed",
    "score_corpus",
    "smatch_exhaustive",
    "smatch_pair",
    "to_triples",
]
