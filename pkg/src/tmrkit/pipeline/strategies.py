"""The four generation strategies around a pluggable backend.

Base issues one generation call. RibAG retrieves from image-extracted
entities before its single real generation (two backend calls total).
RimAG generates an initial graph, retrieves from it, then regenerates.
RieAG generates once and splices retrieved codes in mechanically.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum

from tmrkit.core.model import TmrGraph
from tmrkit.core.serialize import serialize_tmr
from tmrkit.core.validate import WellFormedness, check_tmr, validate
from tmrkit.knowledge.context import RetrievalService, build_context
from tmrkit.knowledge.types import RetrievalContext
from tmrkit.pipeline.backend import BackendError, extract_candidate_tmr
from tmrkit.pipeline.entities import (
    extract_entities_from_text,
    extract_entities_from_tmr,
    parse_entity_reply,
)
from tmrkit.pipeline.prompts import (
    PromptSpec,
    Shot,
    build_extraction_prompt,
    build_generation_prompt,
    render_retrieval_block,
    select_shots,
    template_hash,
)
from tmrkit.pipeline.replace import replace_codes, replace_codes_text


class Strategy(str, Enum):
    BASE = "base"
    RIBAG = "rib"
    RIMAG = "rim"
    RIEAG = "rie"


@dataclass(frozen=True)
class PromptRecord:
    """What was asked, compressed to what reproducibility needs."""

    digest: str
    template_id: str
    template_hash: str
    shot_count: int
    has_retrieval: bool

    @classmethod
    def of(cls, spec: PromptSpec) -> PromptRecord:
        return cls(
            digest=spec.digest(),
            template_id=spec.template_id,
            template_hash=template_hash(spec.template_id),
            shot_count=len(spec.shots),
            has_retrieval=spec.retrieval_block is not None,
        )


@dataclass(frozen=True)
class PipelineRun:
    """One image's journey through a strategy."""

    strategy: Strategy
    image: str
    prompts: tuple[PromptRecord, ...]
    replies: tuple[str, ...]
    tmr0_text: str | None
    final_text: str
    final_graph: TmrGraph | None
    wellformedness: WellFormedness
    context: RetrievalContext | None
    warnings: tuple[str, ...] = ()
    elapsed_s: float = 0.0

    @property
    def well_formed(self) -> bool:
        return self.final_graph is not None

    def to_json_dict(self) -> dict:
        context = None
        if self.context is not None:
            context = [
                {
                    "kind": group.kind.value,
                    "surface": group.surface,
                    "codes": [c.code for c in group.candidates],
                    "error": group.error,
                }
                for group in self.context.groups
            ]
        return {
            "strategy": self.strategy.value,
            "image": self.image,
            "prompts": [
                {
                    "digest": record.digest,
                    "template_id": record.template_id,
                    "template_hash": record.template_hash,
                    "shot_count": record.shot_count,
                    "has_retrieval": record.has_retrieval,
                }
                for record in self.prompts
            ],
            "replies": list(self.replies),
            "tmr0": self.tmr0_text,
            "final": self.final_text,
            "well_formed": self.well_formed,
            "defects": [defect.render() for defect in self.wellformedness.defects],
            "context": context,
            "warnings": list(self.warnings),
            "elapsed_s": self.elapsed_s,
        }


def _judge(reply: str) -> tuple[str, TmrGraph | None, WellFormedness]:
    """Sanitize a reply and settle on (final text, graph or None, verdict)."""
    candidate = extract_candidate_tmr(reply)
    probe = candidate if candidate is not None else reply
    graph, verdict = check_tmr(probe)
    if graph is not None and verdict.well_formed:
        return serialize_tmr(graph), graph, verdict
    return probe, None, verdict


def _generate(backend, spec: PromptSpec, warnings: list[str]) -> str:
    try:
        return backend.generate(spec)
    except BackendError as exc:
        warnings.append(f"backend failure: {exc}")
        return ""


def _context_warnings(context: RetrievalContext) -> list[str]:
    return [
        f"retrieval failed for {group.kind.value} {group.surface!r}: {group.error}"
        for group in context.groups
        if group.error is not None
    ]


def run_base(
    image: str,
    backend,
    shots: int = 0,
    seed: int = 0,
    shot_pool: tuple[Shot, ...] = (),
    template_id: str = "generate_v1",
) -> PipelineRun:
    started = time.perf_counter()
    warnings: list[str] = []
    spec = build_generation_prompt(
        image, select_shots(shot_pool, shots, seed), None, template_id
    )
    reply = _generate(backend, spec, warnings)
    final_text, graph, verdict = _judge(reply)
    return PipelineRun(
        strategy=Strategy.BASE,
        image=image,
        prompts=(PromptRecord.of(spec),),
        replies=(reply,),
        tmr0_text=None,
        final_text=final_text,
        final_graph=graph,
        wellformedness=verdict,
        context=None,
        warnings=tuple(warnings),
        elapsed_s=time.perf_counter() - started,
    )


def run_ribag(
    image: str,
    backend,
    shots: int = 0,
    seed: int = 0,
    shot_pool: tuple[Shot, ...] = (),
    anchor=None,
    retrieval: RetrievalService | None = None,
    template_id: str = "generate_v1",
) -> PipelineRun:
    started = time.perf_counter()
    warnings: list[str] = []
    extraction_spec = build_extraction_prompt(image)
    records = [PromptRecord.of(extraction_spec)]
    replies = []

    context = RetrievalContext(())
    try:
        extraction_reply = backend.generate(extraction_spec)
    except BackendError as exc:
        extraction_reply = ""
        warnings.append(f"entity extraction failed: {exc}")
    replies.append(extraction_reply)
    entities, parse_warnings = parse_entity_reply(extraction_reply)
    warnings.extend(parse_warnings)
    if entities:
        context = build_context(entities, anchor=anchor, service=retrieval)
        warnings.extend(_context_warnings(context))

    spec = build_generation_prompt(
        image,
        select_shots(shot_pool, shots, seed),
        render_retrieval_block(context),
        template_id,
    )
    records.append(PromptRecord.of(spec))
    reply = _generate(backend, spec, warnings)
    replies.append(reply)
    final_text, graph, verdict = _judge(reply)
    return PipelineRun(
        strategy=Strategy.RIBAG,
        image=image,
        prompts=tuple(records),
        replies=tuple(replies),
        tmr0_text=None,
        final_text=final_text,
        final_graph=graph,
        wellformedness=verdict,
        context=context,
        warnings=tuple(warnings),
        elapsed_s=time.perf_counter() - started,
    )


def _initial_graph(
    image: str,
    backend,
    shots: int,
    seed: int,
    shot_pool: tuple[Shot, ...],
    template_id: str,
    warnings: list[str],
) -> tuple[PromptRecord, str, str, TmrGraph | None, WellFormedness]:
    spec = build_generation_prompt(
        image, select_shots(shot_pool, shots, seed), None, template_id
    )
    reply = _generate(backend, spec, warnings)
    candidate = extract_candidate_tmr(reply)
    probe = candidate if candidate is not None else reply
    graph, verdict = check_tmr(probe)
    if graph is not None and verdict.well_formed:
        return PromptRecord.of(spec), reply, serialize_tmr(graph), graph, verdict
    return PromptRecord.of(spec), reply, probe, None, verdict


def run_rimag(
    image: str,
    backend,
    shots: int = 0,
    seed: int = 0,
    shot_pool: tuple[Shot, ...] = (),
    anchor=None,
    retrieval: RetrievalService | None = None,
    template_id: str = "generate_v1",
) -> PipelineRun:
    started = time.perf_counter()
    warnings: list[str] = []
    record0, reply0, tmr0_text, graph0, verdict0 = _initial_graph(
        image, backend, shots, seed, shot_pool, template_id, warnings
    )
    if graph0 is None:
        # Nothing trustworthy to mine for entities; stop at the first call.
        warnings.append("initial graph ill-formed; no refinement call issued")
        return PipelineRun(
            strategy=Strategy.RIMAG,
            image=image,
            prompts=(record0,),
            replies=(reply0,),
            tmr0_text=tmr0_text,
            final_text=tmr0_text,
            final_graph=None,
            wellformedness=verdict0,
            context=RetrievalContext(()),
            warnings=tuple(warnings),
            elapsed_s=time.perf_counter() - started,
        )

    extraction = extract_entities_from_tmr(graph0)
    warnings.extend(extraction.warnings)
    context = RetrievalContext(())
    if extraction.entities:
        context = build_context(extraction.entities, anchor=anchor, service=retrieval)
        warnings.extend(_context_warnings(context))

    spec = build_generation_prompt(
        image,
        select_shots(shot_pool, shots, seed),
        render_retrieval_block(context),
        template_id,
    )
    reply = _generate(backend, spec, warnings)
    final_text, graph, verdict = _judge(reply)
    return PipelineRun(
        strategy=Strategy.RIMAG,
        image=image,
        prompts=(record0, PromptRecord.of(spec)),
        replies=(reply0, reply),
        tmr0_text=tmr0_text,
        final_text=final_text,
        final_graph=graph,
        wellformedness=verdict,
        context=context,
        warnings=tuple(warnings),
        elapsed_s=time.perf_counter() - started,
    )


def run_rieag(
    image: str,
    backend,
    shots: int = 0,
    seed: int = 0,
    shot_pool: tuple[Shot, ...] = (),
    anchor=None,
    retrieval: RetrievalService | None = None,
    template_id: str = "generate_v1",
) -> PipelineRun:
    started = time.perf_counter()
    warnings: list[str] = []
    record0, reply0, tmr0_text, graph0, verdict0 = _initial_graph(
        image, backend, shots, seed, shot_pool, template_id, warnings
    )

    context = RetrievalContext(())
    if graph0 is not None:
        extraction = extract_entities_from_tmr(graph0)
        warnings.extend(extraction.warnings)
        if extraction.entities:
            context = build_context(
                extraction.entities, anchor=anchor, service=retrieval
            )
            warnings.extend(_context_warnings(context))
        final_graph = replace_codes(graph0, context)
        final_text = serialize_tmr(final_graph)
        verdict = validate(final_graph)
        return PipelineRun(
            strategy=Strategy.RIEAG,
            image=image,
            prompts=(record0,),
            replies=(reply0,),
            tmr0_text=tmr0_text,
            final_text=final_text,
            final_graph=final_graph,
            wellformedness=verdict,
            context=context,
            warnings=tuple(warnings),
            elapsed_s=time.perf_counter() - started,
        )

    final_text = tmr0_text
    candidate = extract_candidate_tmr(reply0)
    parsed_but_defective = check_tmr(tmr0_text)[0] is not None
    if candidate is not None and not parsed_but_defective:
        # The reply held a balanced span that would not parse. Patch codes
        # straight into the text; the document stays ill-formed either way.
        extraction = extract_entities_from_text(candidate)
        warnings.extend(extraction.warnings)
        if extraction.entities:
            context = build_context(
                extraction.entities, anchor=anchor, service=retrieval
            )
            warnings.extend(_context_warnings(context))
            final_text = replace_codes_text(candidate, context)
    verdict = check_tmr(final_text)[1]
    return PipelineRun(
        strategy=Strategy.RIEAG,
        image=image,
        prompts=(record0,),
        replies=(reply0,),
        tmr0_text=tmr0_text,
        final_text=final_text,
        final_graph=None,
        wellformedness=verdict,
        context=context,
        warnings=tuple(warnings),
        elapsed_s=time.perf_counter() - started,
    )


_RUNNERS = {
    Strategy.BASE: run_base,
    Strategy.RIBAG: run_ribag,
    Strategy.RIMAG: run_rimag,
    Strategy.RIEAG: run_rieag,
}


def run_strategy(strategy: Strategy, image: str, backend, **kwargs) -> PipelineRun:
    runner = _RUNNERS[strategy]
    if strategy is Strategy.BASE:
        kwargs.pop("anchor", None)
        kwargs.pop("retrieval", None)
    return runner(image, backend, **kwargs)


__all__ = [
    "PipelineRun",
    "PromptRecord",
    "Strategy",
    "run_base",
    "run_ribag",
    "run_rieag",
    "run_rimag",
    "run_strategy",
]
