"""Brute-force optimum for the pair match score.

Enumerates every injective variable mapping between two small graphs and
applies it triple by triple.  Exponential on purpose: this is the ground
truth the hill-climbing search is measured against, so it shares no code
with the search beyond triple extraction.
"""

from __future__ import annotations

import itertools

from tmrkit.core.model import TmrGraph
from tmrkit.scoring.smatch import SmatchScore
from tmrkit.scoring.triples import Triple, TripleKind, to_triples

MAX_VARS = 8


def _apply(triple: Triple, mapping: dict[str, str]) -> Triple | None:
    source = mapping.get(triple.source)
    if source is None:
        return None
    if triple.kind is TripleKind.RELATION:
        target = mapping.get(triple.target)
        if target is None:
            return None
        return Triple(triple.kind, triple.relation_label, source, target)
    return Triple(triple.kind, triple.relation_label, source, triple.target)


def _matched(
    pred_triples: frozenset[Triple],
    gold_triples: frozenset[Triple],
    mapping: dict[str, str],
) -> int:
    count = 0
    for triple in pred_triples:
        image = _apply(triple, mapping)
        if image is not None and image in gold_triples:
            count += 1
    return count


def smatch_exhaustive(pred: TmrGraph, gold: TmrGraph) -> SmatchScore:
    """True optimum over all injective mappings; refuses large graphs."""
    pred_vars = sorted(pred.nodes)
    gold_vars = sorted(gold.nodes)
    if len(pred_vars) > MAX_VARS or len(gold_vars) > MAX_VARS:
        raise ValueError(
            f"exhaustive search is capped at {MAX_VARS} variables per graph"
        )
    pred_triples = to_triples(pred)
    gold_triples = to_triples(gold)

    best = 0
    if len(pred_vars) <= len(gold_vars):
        for chosen in itertools.permutations(gold_vars, len(pred_vars)):
            mapping = dict(zip(pred_vars, chosen))
            best = max(best, _matched(pred_triples, gold_triples, mapping))
    else:
        for chosen in itertools.permutations(pred_vars, len(gold_vars)):
            mapping = dict(zip(chosen, gold_vars))
            best = max(best, _matched(pred_triples, gold_triples, mapping))
    return SmatchScore(best, len(pred_triples), len(gold_triples))
