"""Batch retrieval: dispatch entities to their sources, filter, group.

Lookups for distinct entities run on a small thread pool; results are
merged back in input order, and a failed lookup becomes an empty group
carrying the error text instead of sinking the batch.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Sequence

from tmrkit.assets import data_path
from tmrkit.knowledge.geo import (
    FixtureGeoSource,
    GeoNamesClient,
    GeoQuery,
    haversine_km,
)
from tmrkit.knowledge.hisco import HiscoTable, packaged_hisco_table
from tmrkit.knowledge.types import (
    ContextGroup,
    Entity,
    EntityKind,
    RetrievalCandidate,
    RetrievalContext,
    RetrievalError,
)
from tmrkit.knowledge.wordnet import WordnetLexicon, packaged_wordnet_lexicon

DEFAULT_GEO_LIMIT = 5
DEFAULT_CONCURRENCY = 4


class RetrievalService:
    def __init__(
        self,
        geo_source: GeoNamesClient | FixtureGeoSource | None = None,
        hisco_table: HiscoTable | None = None,
        wordnet_lexicon: WordnetLexicon | None = None,
        geo_limit: int = DEFAULT_GEO_LIMIT,
        concurrency: int = DEFAULT_CONCURRENCY,
    ):
        if geo_source is None:
            # Replay the packaged lookups; unknown toponyms still go remote.
            geo_source = GeoNamesClient(
                cache_path=data_path("geonames_cache.json"), readonly_cache=True
            )
        self.geo_source = geo_source
        self.hisco_table = hisco_table or packaged_hisco_table()
        self.wordnet_lexicon = wordnet_lexicon or packaged_wordnet_lexicon()
        self.geo_limit = geo_limit
        self.concurrency = max(1, concurrency)

    def _geo_candidates(
        self, entity: Entity, anchor: tuple[float, float] | None
    ) -> tuple[RetrievalCandidate, ...]:
        found = self.geo_source.search(
            GeoQuery(entity.surface, anchor), self.geo_limit
        )
        if anchor is None or not found:
            return tuple(found)
        with_distance = [
            replace(c, distance_km=haversine_km(c.coordinate, anchor)) for c in found
        ]
        with_distance.sort(key=lambda c: c.distance_km)
        return tuple(with_distance)

    def _lookup(
        self, entity: Entity, anchor: tuple[float, float] | None
    ) -> ContextGroup:
        try:
            if entity.kind is EntityKind.GEO:
                candidates = self._geo_candidates(entity, anchor)
            elif entity.kind is EntityKind.HISCO:
                candidates = tuple(self.hisco_table.lookup(entity.surface))
            else:
                candidates = tuple(
                    self.wordnet_lexicon.lookup(entity.surface, entity.pos or "n")
                )
        except (RetrievalError, ValueError) as exc:
            return ContextGroup(entity.kind, entity.surface, (), str(exc))
        return ContextGroup(entity.kind, entity.surface, candidates)

    def build_context(
        self,
        entities: Sequence[Entity],
        anchor: tuple[float, float] | None = None,
    ) -> RetrievalContext:
        """Resolve every entity; groups come back in input order."""
        if not entities:
            return RetrievalContext(())
        with ThreadPoolExecutor(max_workers=self.concurrency) as pool:
            futures = [pool.submit(self._lookup, e, anchor) for e in entities]
            groups = tuple(future.result() for future in futures)
        return RetrievalContext(groups)


def build_context(
    entities: Sequence[Entity],
    anchor: tuple[float, float] | None = None,
    service: RetrievalService | None = None,
) -> RetrievalContext:
    if service is None:
        service = RetrievalService()
    return service.build_context(entities, anchor)
