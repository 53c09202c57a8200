"""Pair match score via hill-climbing over injective variable mappings.

A predicted triple counts as matched when, after substituting variables
through the mapping, it is identical to a gold triple (kind, label, and
constants included).  The search climbs from one concept-overlap seed plus
``restarts - 1`` random seeds, applying single-pair add/change/remove moves
while they strictly improve the match count, and keeps the best run.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from tmrkit.core.model import TmrGraph
from tmrkit.core.validate import validate
from tmrkit.scoring.triples import Triple, TripleKind, to_triples

VariableMapping = dict[str, str]

_Pair = tuple[str, str]


@dataclass(frozen=True)
class SmatchScore:
    """Counts behind a pair score; derived ratios are properties."""

    matched: int
    predicted: int
    gold: int

    @property
    def precision(self) -> float:
        return self.matched / self.predicted if self.predicted else 0.0

    @property
    def recall(self) -> float:
        return self.matched / self.gold if self.gold else 0.0

    @property
    def f1(self) -> float:
        total = self.precision + self.recall
        return 2.0 * self.precision * self.recall / total if total else 0.0


def _build_tables(
    pred_triples: frozenset[Triple], gold_triples: frozenset[Triple]
) -> tuple[dict[_Pair, int], dict[tuple[_Pair, _Pair], int]]:
    """Precompute match weights.

    ``unary[(p, g)]`` counts instance and attribute triples that match when
    p maps to g; ``binary[((p1, g1), (p2, g2))]`` counts relation triples
    that need both pairs at once.  Self-loop relations fold into unary.
    """
    gold_facts: dict[tuple[TripleKind, str, str], list[str]] = {}
    gold_relations: dict[str, list[_Pair]] = {}
    for triple in gold_triples:
        if triple.kind is TripleKind.RELATION:
            gold_relations.setdefault(triple.relation_label, []).append(
                (triple.source, triple.target)
            )
        else:
            key = (triple.kind, triple.relation_label, triple.target)
            gold_facts.setdefault(key, []).append(triple.source)

    unary: dict[_Pair, int] = {}
    binary: dict[tuple[_Pair, _Pair], int] = {}
    for triple in pred_triples:
        if triple.kind is TripleKind.RELATION:
            for gsrc, gtgt in gold_relations.get(triple.relation_label, ()):
                if triple.source == triple.target and gsrc == gtgt:
                    pair = (triple.source, gsrc)
                    unary[pair] = unary.get(pair, 0) + 1
                elif triple.source != triple.target and gsrc != gtgt:
                    key = ((triple.source, gsrc), (triple.target, gtgt))
                    binary[key] = binary.get(key, 0) + 1
        else:
            key = (triple.kind, triple.relation_label, triple.target)
            for gsrc in gold_facts.get(key, ()):
                pair = (triple.source, gsrc)
                unary[pair] = unary.get(pair, 0) + 1
    return unary, binary


def _table_score(
    mapping: VariableMapping,
    unary: dict[_Pair, int],
    binary: dict[tuple[_Pair, _Pair], int],
) -> int:
    pairs = list(mapping.items())
    total = sum(unary.get(pair, 0) for pair in pairs)
    for first in pairs:
        for second in pairs:
            total += binary.get((first, second), 0)
    return total


def _greedy_seed(
    pred_vars: list[str], gold_vars: list[str], unary: dict[_Pair, int]
) -> VariableMapping:
    mapping: VariableMapping = {}
    used: set[str] = set()
    for pvar in pred_vars:
        best_gvar = None
        best_weight = 0
        for gvar in gold_vars:
            if gvar in used:
                continue
            weight = unary.get((pvar, gvar), 0)
            if weight > best_weight:
                best_gvar, best_weight = gvar, weight
        if best_gvar is not None:
            mapping[pvar] = best_gvar
            used.add(best_gvar)
    return mapping


def _random_seed(
    pred_vars: list[str], gold_vars: list[str], rng: random.Random
) -> VariableMapping:
    shuffled_pred = rng.sample(pred_vars, len(pred_vars))
    shuffled_gold = rng.sample(gold_vars, len(gold_vars))
    return dict(zip(shuffled_pred, shuffled_gold))


def _climb(
    mapping: VariableMapping,
    pred_vars: list[str],
    gold_vars: list[str],
    unary: dict[_Pair, int],
    binary: dict[tuple[_Pair, _Pair], int],
) -> tuple[VariableMapping, int]:
    current = dict(mapping)
    score = _table_score(current, unary, binary)
    # A lone pair never unlocks a relation match, so single-pair moves
    # cannot climb out of a map with no concept overlap; adopting both
    # endpoint pairs of a weighted relation at once can.
    joint_moves = sorted(binary)
    while True:
        best_gain = 0
        best_next: VariableMapping | None = None
        used = set(current.values())
        for pvar in pred_vars:
            owned = current.get(pvar)
            if owned is not None:
                trial = dict(current)
                del trial[pvar]
                gain = _table_score(trial, unary, binary) - score
                if gain > best_gain:
                    best_gain, best_next = gain, trial
            for gvar in gold_vars:
                if gvar == owned or gvar in used:
                    continue
                trial = dict(current)
                trial[pvar] = gvar
                gain = _table_score(trial, unary, binary) - score
                if gain > best_gain:
                    best_gain, best_next = gain, trial
        for left_index, left in enumerate(pred_vars):
            for right in pred_vars[left_index + 1 :]:
                left_gold = current.get(left)
                right_gold = current.get(right)
                if left_gold is None and right_gold is None:
                    continue
                trial = dict(current)
                if right_gold is None:
                    del trial[left]
                else:
                    trial[left] = right_gold
                if left_gold is None:
                    del trial[right]
                else:
                    trial[right] = left_gold
                gain = _table_score(trial, unary, binary) - score
                if gain > best_gain:
                    best_gain, best_next = gain, trial
        for (first_pred, first_gold), (second_pred, second_gold) in joint_moves:
            if (
                current.get(first_pred) == first_gold
                and current.get(second_pred) == second_gold
            ):
                continue
            trial = {
                pvar: gvar
                for pvar, gvar in current.items()
                if gvar not in (first_gold, second_gold)
            }
            trial[first_pred] = first_gold
            trial[second_pred] = second_gold
            gain = _table_score(trial, unary, binary) - score
            if gain > best_gain:
                best_gain, best_next = gain, trial
        if best_next is None:
            return current, score
        current = best_next
        score += best_gain


def smatch_pair(
    pred: TmrGraph | None,
    gold: TmrGraph,
    restarts: int = 4,
    seed: int = 0,
) -> tuple[SmatchScore, VariableMapping]:
    """Score a prediction against a well-formed gold graph.

    ``pred`` may be None or ill-formed; either way the pair scores zero
    with zero predicted triples.  ``restarts`` counts total climb starts
    (the first is concept-seeded, the rest random).  Deterministic for a
    fixed seed.
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    gold_verdict = validate(gold)
    if not gold_verdict.well_formed:
        listing = "; ".join(d.render() for d in gold_verdict.defects)
        raise ValueError(f"gold graph is ill-formed: {listing}")
    gold_triples = to_triples(gold)

    if pred is None or not validate(pred).well_formed:
        return SmatchScore(0, 0, len(gold_triples)), {}

    pred_triples = to_triples(pred)
    pred_vars = sorted(pred.nodes)
    gold_vars = sorted(gold.nodes)
    unary, binary = _build_tables(pred_triples, gold_triples)

    rng = random.Random(seed)
    best_score = -1
    best_mapping: VariableMapping = {}
    for start_index in range(restarts):
        if start_index == 0:
            start = _greedy_seed(pred_vars, gold_vars, unary)
        else:
            start = _random_seed(pred_vars, gold_vars, rng)
        mapping, score = _climb(start, pred_vars, gold_vars, unary, binary)
        if score > best_score:
            best_score, best_mapping = score, mapping
    return (
        SmatchScore(best_score, len(pred_triples), len(gold_triples)),
        best_mapping,
    )
