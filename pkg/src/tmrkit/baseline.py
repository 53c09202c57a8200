"""Constant-output baseline: the training graph closest to all the others.

Every training graph is scored against every other one; the graph with the
highest mean f1 becomes the baseline prediction for any input.  Self-pairs
are excluded from the mean, and ties go to the lowest index so reruns pick
the same graph.
"""

from __future__ import annotations

from dataclasses import dataclass

from tmrkit.core.model import TmrGraph
from tmrkit.core.validate import validate
from tmrkit.scoring.report import pair_seed
from tmrkit.scoring.smatch import smatch_pair


@dataclass(frozen=True)
class BaselineResult:
    chosen: TmrGraph
    chosen_index: int
    mean_score: float
    per_candidate: tuple[tuple[int, float], ...]


def deterministic_baseline(
    training: list[TmrGraph], restarts: int = 4, seed: int = 0
) -> BaselineResult:
    """Pick the training graph with the highest mean pair score.

    Raises :class:`ValueError` when fewer than two graphs are given or any
    graph is ill-formed (the error names its index).
    """
    count = len(training)
    if count < 2:
        raise ValueError("baseline needs at least 2 training graphs")
    for index, graph in enumerate(training):
        verdict = validate(graph)
        if not verdict.well_formed:
            listing = "; ".join(d.render() for d in verdict.defects)
            raise ValueError(f"training graph {index} is ill-formed: {listing}")

    per_candidate: list[tuple[int, float]] = []
    for cand in range(count):
        total = 0.0
        for other in range(count):
            if other == cand:
                continue
            score, _ = smatch_pair(
                training[cand],
                training[other],
                restarts=restarts,
                seed=pair_seed(seed, cand * count + other),
            )
            total += score.f1
        per_candidate.append((cand, total / (count - 1)))

    best_index, best_mean = per_candidate[0]
    for index, mean in per_candidate[1:]:
        if mean > best_mean:
            best_index, best_mean = index, mean
    return BaselineResult(
        chosen=training[best_index],
        chosen_index=best_index,
        mean_score=best_mean,
        per_candidate=tuple(per_candidate),
    )
