"""Prompt assembly: versioned templates, few-shot selection, digests.

The instruction text is constant for a given template version; worked
examples and retrieved codes travel as separate structured parts.  Two
prompts therefore differ exactly where their parts differ, which makes
request digests meaningful cache and transcript keys.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from tmrkit.assets import data_path
from tmrkit.knowledge.types import RetrievalContext

MAX_SHOTS = 6

GRAMMAR_SUMMARY = """\
A graph is written as (variable / concept ...relations) where:
- variable: one lowercase letter followed by digits, unique per node
- concept: lemma.pos.sense with pos one of n/v/a/r and a two-digit sense
- relation: a colon plus three lowercase letters (for example :ent, :nam),
  optionally suffixed with -of to invert its direction
- relation values: a nested node, a variable, or a quoted string for
  names, reference codes, and date parts
Every node must be reachable from the single root and no relation chain
may loop back on itself."""

OUTPUT_RULES = """\
Reply with exactly one graph and nothing else: no prose, no code fences.
Start at '(' and end at the matching ')'. Use fresh variables."""

SHOTS_NOTE = (
    "Any worked example image and graph pairs accompany this prompt as"
    " separate parts."
)

RETRIEVAL_NOTE = (
    "Any retrieved reference codes accompany this prompt as a separate"
    " part; prefer them over guessing codes."
)


@dataclass(frozen=True)
class Shot:
    """One worked example: an image reference and its reference graph."""

    image: str
    gold_text: str


@dataclass(frozen=True)
class PromptSpec:
    """A fully assembled request, digestable for caching and replay."""

    instruction: str
    shots: tuple[Shot, ...]
    retrieval_block: str | None
    image: str
    template_id: str

    def __post_init__(self) -> None:
        if len(self.shots) > MAX_SHOTS:
            raise ValueError(f"at most {MAX_SHOTS} shots are supported")

    def parts(self) -> dict:
        return {
            "template_id": self.template_id,
            "instruction": self.instruction,
            "shots": [[shot.image, shot.gold_text] for shot in self.shots],
            "retrieval_block": self.retrieval_block,
            "image": self.image,
        }

    def digest(self) -> str:
        canonical = json.dumps(self.parts(), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@lru_cache(maxsize=None)
def load_template(template_id: str) -> str:
    return data_path("templates").joinpath(f"{template_id}.txt").read_text("utf-8")


@lru_cache(maxsize=None)
def template_hash(template_id: str) -> str:
    return hashlib.sha256(load_template(template_id).encode("utf-8")).hexdigest()


def select_shots(pool: Sequence[Shot], count: int, seed: int) -> tuple[Shot, ...]:
    """Draw `count` distinct examples; a pure function of (pool, count, seed)."""
    if not 0 <= count <= MAX_SHOTS:
        raise ValueError(f"shot count must be in [0, {MAX_SHOTS}], got {count}")
    if count > len(pool):
        raise ValueError(f"asked for {count} shots but the pool has {len(pool)}")
    rng = random.Random(seed)
    return tuple(rng.sample(list(pool), count))


def render_retrieval_block(context: RetrievalContext) -> str:
    """One line per entity group: kind, surface, then candidate codes."""
    lines = []
    for group in context.groups:
        label = f"{group.kind.value.upper()} {group.surface}:"
        if group.error:
            lines.append(f"{label} ERROR {group.error}")
        elif not group.candidates:
            lines.append(f"{label} NO MATCH")
        else:
            lines.append(f"{label} " + ", ".join(c.code for c in group.candidates))
    return "\n".join(lines)


def _fill(template_id: str) -> str:
    return (
        load_template(template_id)
        .replace("{GRAMMAR_SUMMARY}", GRAMMAR_SUMMARY)
        .replace("{SHOTS}", SHOTS_NOTE)
        .replace("{RETRIEVAL_BLOCK}", RETRIEVAL_NOTE)
        .replace("{OUTPUT_RULES}", OUTPUT_RULES)
    )


def build_generation_prompt(
    image: str,
    shots: Sequence[Shot] = (),
    retrieval_block: str | None = None,
    template_id: str = "generate_v1",
) -> PromptSpec:
    return PromptSpec(
        instruction=_fill(template_id),
        shots=tuple(shots),
        retrieval_block=retrieval_block,
        image=image,
        template_id=template_id,
    )


def build_extraction_prompt(image: str, template_id: str = "extract_v1") -> PromptSpec:
    return PromptSpec(
        instruction=load_template(template_id),
        shots=(),
        retrieval_block=None,
        image=image,
        template_id=template_id,
    )
