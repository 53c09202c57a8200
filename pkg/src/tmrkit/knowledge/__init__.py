"""Retrieval layer: gazetteer, occupation codes, senses, and batch context."""

from tmrkit.knowledge.context import RetrievalService, build_context
from tmrkit.knowledge.geo import (
    EARTH_RADIUS_KM,
    FixtureGeoSource,
    GeoNamesClient,
    filter_nearest_geo,
    geonames_search,
    haversine_km,
)
from tmrkit.knowledge.hisco import HiscoTable, hisco_lookup, packaged_hisco_table
from tmrkit.knowledge.types import (
    ContextGroup,
    Entity,
    EntityKind,
    GeoQuery,
    NetworkError,
    QuotaExceededError,
    RetrievalCandidate,
    RetrievalContext,
    RetrievalError,
    fold,
    strip_diacritics,
)
from tmrkit.knowledge.wordnet import (
    WordnetLexicon,
    packaged_wordnet_lexicon,
    wordnet_lookup,
)

__all__ = [
    "EARTH_RADIUS_KM",
    "ContextGroup",
    "Entity",
    "EntityKind",
    "FixtureGeoSource",
    "GeoNamesClient",
    "GeoQuery",
    "HiscoTable",
    "NetworkError",
    "QuotaExceededError",
    "RetrievalCandidate",
    "RetrievalContext",
    "RetrievalError",
    "RetrievalService",
    "WordnetLexicon",
    "build_context",
    "filter_nearest_geo",
    "fold",
    "geonames_search",
    "haversine_km",
    "hisco_lookup",
    "packaged_hisco_table",
    "packaged_wordnet_lexicon",
    "strip_diacritics",
    "wordnet_lookup",
]
