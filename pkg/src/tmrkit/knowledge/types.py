"""Shared types for the retrieval layer."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from enum import Enum


class RetrievalError(Exception):
    """Base class for lookup failures."""


class NetworkError(RetrievalError):
    """Transport failure after exhausting retries."""


class QuotaExceededError(RetrievalError):
    """The remote account ran out of request credits."""


class EntityKind(str, Enum):
    GEO = "geo"
    HISCO = "hisco"
    SYNSET = "synset"


@dataclass(frozen=True)
class Entity:
    """One mention to look up: a toponym, an occupation, or a lemma."""

    surface: str
    kind: EntityKind
    pos: str | None = None


def strip_diacritics(text: str) -> str:
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def fold(text: str) -> str:
    """Normalize a query the way inscriptions are carved: bare and upper."""
    return strip_diacritics(text).strip().upper()


@dataclass(frozen=True)
class GeoQuery:
    toponym: str
    anchor: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if not self.toponym.strip():
            raise ValueError("toponym is empty after trimming")


@dataclass(frozen=True)
class RetrievalCandidate:
    """One lookup hit; `code` is what ends up inside a TMR attribute."""

    kind: EntityKind
    surface: str
    code: str
    coordinate: tuple[float, float] | None = None
    pos: str | None = None
    distance_km: float | None = None

    def __post_init__(self) -> None:
        if self.kind is EntityKind.GEO and self.coordinate is None:
            raise ValueError(f"geo candidate {self.code} lacks a coordinate")
        if self.kind is EntityKind.SYNSET and self.pos is None:
            raise ValueError(f"synset candidate {self.code} lacks a pos")
        if self.distance_km is not None and self.distance_km < 0:
            raise ValueError("distance_km must be non-negative")


@dataclass(frozen=True)
class ContextGroup:
    """Filtered candidates for one entity, or the error that emptied it."""

    kind: EntityKind
    surface: str
    candidates: tuple[RetrievalCandidate, ...] = ()
    error: str | None = None


@dataclass(frozen=True)
class RetrievalContext:
    groups: tuple[ContextGroup, ...] = ()

    def by_kind(self, kind: EntityKind) -> tuple[ContextGroup, ...]:
        return tuple(group for group in self.groups if group.kind is kind)

    @property
    def empty(self) -> bool:
        return all(not group.candidates for group in self.groups)
