"""Corpus manifests: JSON Lines of image/gold pairs with GPS, tags, splits.

One entry per line keeps manifests streamable and diff-friendly; loading
checks the schema eagerly so later stages can trust every field.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

SPLITS = ("train", "test")


class ManifestError(ValueError):
    """A manifest line violating the schema; message carries the line number."""


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    image: str
    gold: str
    gps: tuple[float, float] | None = None
    tags: tuple[str, ...] = ()
    split: str = "train"

    def __post_init__(self) -> None:
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}, got {self.split!r}")


def _entry_from_record(record: dict, where: str) -> CorpusEntry:
    for field in ("id", "image", "gold", "split"):
        value = record.get(field)
        if not isinstance(value, str) or not value:
            raise ManifestError(f"{where}: missing or empty field {field!r}")
    lat, lon = record.get("lat"), record.get("lon")
    if (lat is None) != (lon is None):
        raise ManifestError(f"{where}: lat and lon must be given together")
    gps = None
    if lat is not None:
        if not isinstance(lat, (int, float)) or not isinstance(lon, (int, float)):
            raise ManifestError(f"{where}: lat and lon must be numbers")
        gps = (float(lat), float(lon))
    tags = record.get("tags", [])
    if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
        raise ManifestError(f"{where}: tags must be a list of strings")
    if record["split"] not in SPLITS:
        raise ManifestError(f"{where}: split must be one of {SPLITS}")
    return CorpusEntry(
        id=record["id"],
        image=record["image"],
        gold=record["gold"],
        gps=gps,
        tags=tuple(tags),
        split=record["split"],
    )


def load_manifest(path: str | Path) -> list[CorpusEntry]:
    """Parse a JSON Lines manifest, reporting problems by line number."""
    path = Path(path)
    entries: list[CorpusEntry] = []
    seen: dict[str, int] = {}
    with path.open(encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            where = f"{path}:{number}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{where}: invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise ManifestError(f"{where}: expected a JSON object")
            entry = _entry_from_record(record, where)
            if entry.id in seen:
                raise ManifestError(
                    f"{where}: duplicate id {entry.id!r}"
                    f" (first seen on line {seen[entry.id]})"
                )
            seen[entry.id] = number
            entries.append(entry)
    return entries


def write_manifest(entries: Iterable[CorpusEntry], path: str | Path) -> None:
    path = Path(path)
    lines = []
    for entry in entries:
        lines.append(
            json.dumps(
                {
                    "id": entry.id,
                    "image": entry.image,
                    "gold": entry.gold,
                    "lat": entry.gps[0] if entry.gps else None,
                    "lon": entry.gps[1] if entry.gps else None,
                    "tags": list(entry.tags),
                    "split": entry.split,
                },
                ensure_ascii=False,
            )
        )
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text("\n".join(lines) + ("\n" if lines else ""), "utf-8")
    tmp.replace(path)


def split_corpus(
    entries: Sequence[CorpusEntry], ratio: float, seed: int
) -> tuple[list[CorpusEntry], list[CorpusEntry]]:
    """Shuffle with the seed, then cut so |train| = round(ratio * n).

    Halves round up, so a single entry at ratio 0.5 lands in train.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    shuffled = list(entries)
    random.Random(seed).shuffle(shuffled)
    cut = math.floor(ratio * len(shuffled) + 0.5)
    train = [replace(e, split="train") for e in shuffled[:cut]]
    test = [replace(e, split="test") for e in shuffled[cut:]]
    return train, test


def filter_by_tag(entries: Sequence[CorpusEntry], tag: str) -> list[CorpusEntry]:
    return [entry for entry in entries if tag in entry.tags]


__all__ = [
    "CorpusEntry",
    "ManifestError",
    "SPLITS",
    "filter_by_tag",
    "load_manifest",
    "split_corpus",
    "write_manifest",
]
