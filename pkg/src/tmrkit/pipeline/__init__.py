"""Generation pipeline: prompts, backends, strategies, code replacement."""

from tmrkit.pipeline.backend import (
    BackendError,
    BackendRefusal,
    BackendTimeout,
    HttpBackend,
    MockBackend,
    extract_candidate_tmr,
)
from tmrkit.pipeline.entities import (
    EntityExtraction,
    ExtractionSource,
    extract_entities_from_image,
    extract_entities_from_text,
    extract_entities_from_tmr,
    parse_entity_reply,
)
from tmrkit.pipeline.prompts import (
    MAX_SHOTS,
    PromptSpec,
    Shot,
    build_extraction_prompt,
    build_generation_prompt,
    render_retrieval_block,
    select_shots,
    template_hash,
)
from tmrkit.pipeline.replace import replace_codes, replace_codes_text
from tmrkit.pipeline.strategies import (
    PipelineRun,
    PromptRecord,
    Strategy,
    run_base,
    run_ribag,
    run_rieag,
    run_rimag,
    run_strategy,
)

__all__ = [
    "BackendError",
    "BackendRefusal",
    "BackendTimeout",
    "EntityExtraction",
    "ExtractionSource",
    "HttpBackend",
    "MAX_SHOTS",
    "MockBackend",
    "PipelineRun",
    "PromptRecord",
    "PromptSpec",
    "Shot",
    "Strategy",
    "build_extraction_prompt",
    "build_generation_prompt",
    "extract_candidate_tmr",
    "extract_entities_from_image",
    "extract_entities_from_text",
    "extract_entities_from_tmr",
    "parse_entity_reply",
    "render_retrieval_block",
    "replace_codes",
    "replace_codes_text",
    "run_base",
    "run_ribag",
    "run_rieag",
    "run_rimag",
    "run_strategy",
    "select_shots",
    "template_hash",
]
