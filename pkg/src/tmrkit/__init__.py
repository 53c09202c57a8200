"""Toolkit for tombstone meaning representations.

Parse, validate, and canonically serialize TMR graphs; score predictions
against references; retrieve gazetteer, occupation, and sense codes; run
image-to-TMR generation strategies around a pluggable model backend; and
degrade corpus images for robustness studies.
"""

from tmrkit.baseline import BaselineResult, deterministic_baseline
from tmrkit.core import (
    TmrGraph,
    TmrParseError,
    check_tmr,
    normalize_inverse,
    parse_tmr,
    serialize_tmr,
    structurally_equal,
    validate,
)
from tmrkit.corpus import (
    CorpusEntry,
    ManifestError,
    filter_by_tag,
    load_manifest,
    split_corpus,
    write_manifest,
)
from tmrkit.degrade import NoiseLevel, alpha_blend, generate_noised_corpus
from tmrkit.scoring import ScoreReport, score_corpus, smatch_pair

__version__ = "0.1.0"

__all__ = [
    "BaselineResult",
    "CorpusEntry",
    "ManifestError",
    "NoiseLevel",
    "ScoreReport",
    "TmrGraph",
    "TmrParseError",
    "alpha_blend",
    "check_tmr",
    "deterministic_baseline",
    "filter_by_tag",
    "generate_noised_corpus",
    "load_manifest",
    "normalize_inverse",
    "parse_tmr",
    "score_corpus",
    "serialize_tmr",
    "smatch_pair",
    "split_corpus",
    "structurally_equal",
    "validate",
    "write_manifest",
    "__version__",
]
