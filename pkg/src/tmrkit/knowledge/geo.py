"""Gazetteer lookups: remote search with a record-replay cache, plus the
great-circle filter that picks the candidate nearest a known coordinate.
"""

from __future__ import annotations

import json
import math
import os
import threading
import time
from dataclasses import replace
from pathlib import Path

import requests

from tmrkit.knowledge.types import (
    EntityKind,
    GeoQuery,
    NetworkError,
    QuotaExceededError,
    RetrievalCandidate,
    fold,
)

EARTH_RADIUS_KM = 6371.0088
DEFAULT_ENDPOINT = "http://api.geonames.org/searchJSON"

# Remote status values that mean the account has no credits left.
_QUOTA_STATUS_VALUES = {18, 19, 20}


def haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance between two (latitude, longitude) pairs."""
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    half_dlat = (lat2 - lat1) / 2.0
    half_dlon = (lon2 - lon1) / 2.0
    chord = (
        math.sin(half_dlat) ** 2
        + math.cos(lat1) * math.cos(lat2) * math.sin(half_dlon) ** 2
    )
    return 2.0 * EARTH_RADIUS_KM * math.asin(math.sqrt(chord))


def filter_nearest_geo(
    candidates: list[RetrievalCandidate], anchor: tuple[float, float]
) -> RetrievalCandidate:
    """Pick the candidate closest to the anchor; ties keep first occurrence."""
    if not candidates:
        raise ValueError("no candidates to filter")
    best = None
    best_distance = math.inf
    for candidate in candidates:
        if candidate.coordinate is None:
            raise ValueError(f"candidate {candidate.code} lacks a coordinate")
        distance = haversine_km(candidate.coordinate, anchor)
        if distance < best_distance:
            best, best_distance = candidate, distance
    assert best is not None
    return replace(best, distance_km=best_distance)


def _candidates_from_records(
    surface: str, records: list[dict]
) -> list[RetrievalCandidate]:
    out = []
    for record in records:
        out.append(
            RetrievalCandidate(
                kind=EntityKind.GEO,
                surface=surface,
                code=str(record["geonameId"]),
                coordinate=(float(record["lat"]), float(record["lng"])),
            )
        )
    return out


def cache_key(toponym: str, limit: int) -> str:
    return f"{fold(toponym)}|{limit}"


class GeoNamesClient:
    """Remote gazetteer search with an on-disk record-replay cache.

    Every successful reply (including empty ones) is recorded under its
    canonical query key; replayed results are rebuilt from the recorded
    records, so a warm cache is indistinguishable from the live call.
    """

    def __init__(
        self,
        username: str | None = None,
        cache_path: str | Path | None = None,
        endpoint: str = DEFAULT_ENDPOINT,
        max_attempts: int = 3,
        backoff_s: float = 0.5,
        timeout_s: float = 10.0,
        readonly_cache: bool = False,
        session: requests.Session | None = None,
    ):
        self.username = username or os.environ.get("GEONAMES_USER", "")
        self.endpoint = endpoint
        self.max_attempts = max_attempts
        self.backoff_s = backoff_s
        self.timeout_s = timeout_s
        self.readonly_cache = readonly_cache
        self.cache_path = Path(cache_path) if cache_path is not None else None
        self._session = session or requests.Session()
        self._lock = threading.Lock()
        self._cache: dict[str, list[dict]] | None = None

    # -- cache ------------------------------------------------------------

    def _load_cache(self) -> dict[str, list[dict]]:
        if self._cache is None:
            if self.cache_path is not None and self.cache_path.exists():
                self._cache = json.loads(self.cache_path.read_text("utf-8"))
            else:
                self._cache = {}
        return self._cache

    def _store(self, key: str, records: list[dict]) -> None:
        cache = self._load_cache()
        cache[key] = records
        if self.cache_path is None or self.readonly_cache:
            return
        self.cache_path.parent.mkdir(parents=True, exist_ok=True)
        scratch = self.cache_path.with_suffix(".tmp")
        scratch.write_text(
            json.dumps(cache, indent=2, sort_keys=True) + "\n", "utf-8"
        )
        scratch.replace(self.cache_path)

    # -- remote -----------------------------------------------------------

    def _fetch(self, toponym: str, limit: int) -> list[dict]:
        params = {
            "q": fold(toponym),
            "maxRows": str(limit),
            "username": self.username,
            "style": "MEDIUM",
        }
        last_error = "no attempt made"
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(self.backoff_s * (2 ** (attempt - 1)))
            try:
                response = self._session.get(
                    self.endpoint, params=params, timeout=self.timeout_s
                )
            except requests.RequestException as exc:
                last_error = str(exc)
                continue
            if response.status_code != 200:
                last_error = f"HTTP {response.status_code}"
                continue
            payload = response.json()
            status = payload.get("status")
            if status:
                if status.get("value") in _QUOTA_STATUS_VALUES:
                    raise QuotaExceededError(status.get("message", "quota exceeded"))
                last_error = status.get("message", "remote error")
                continue
            return payload.get("geonames", [])
        raise NetworkError(f"search failed after {self.max_attempts} attempts: {last_error}")

    # -- public -----------------------------------------------------------

    def search(self, query: GeoQuery, limit: int = 5) -> list[RetrievalCandidate]:
        if limit < 1:
            raise ValueError("limit must be at least 1")
        key = cache_key(query.toponym, limit)
        with self._lock:
            cache = self._load_cache()
            if key in cache:
                return _candidates_from_records(query.toponym, cache[key])
        records = self._fetch(query.toponym, limit)
        kept = [
            {
                "geonameId": record["geonameId"],
                "name": record.get("name", ""),
                "lat": record["lat"],
                "lng": record["lng"],
            }
            for record in records
        ]
        with self._lock:
            self._store(key, kept)
        return _candidates_from_records(query.toponym, kept)


class FixtureGeoSource:
    """Offline gazetteer over a recorded cache file; never touches the net.

    Lookups try the exact (toponym, limit) key first, then fall back to any
    recording of the same toponym at another limit, trimmed to fit.
    """

    def __init__(self, path: str | Path):
        self.table: dict[str, list[dict]] = json.loads(
            Path(path).read_text("utf-8")
        )

    def search(self, query: GeoQuery, limit: int = 5) -> list[RetrievalCandidate]:
        if limit < 1:
            raise ValueError("limit must be at least 1")
        key = cache_key(query.toponym, limit)
        records = self.table.get(key)
        if records is None:
            prefix = f"{fold(query.toponym)}|"
            for other in sorted(self.table):
                if other.startswith(prefix):
                    records = self.table[other][:limit]
                    break
        return _candidates_from_records(query.toponym, records or [])


def geonames_search(
    query: GeoQuery,
    limit: int = 5,
    source: GeoNamesClient | FixtureGeoSource | None = None,
) -> list[RetrievalCandidate]:
    """Search a gazetteer source (a live client unless one is injected)."""
    if source is None:
        source = GeoNamesClient()
    return source.search(query, limit)
