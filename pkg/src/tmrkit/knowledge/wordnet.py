"""Sense lookups against a local lemma/pos/sense lexicon."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from tmrkit.assets import data_path
from tmrkit.core.model import POS_TAGS
from tmrkit.knowledge.types import EntityKind, RetrievalCandidate, strip_diacritics


def _lemma_key(lemma: str) -> str:
    return strip_diacritics(lemma).strip().lower()


class WordnetLexicon:
    """Senses per (lemma, pos), returned in ascending sense order."""

    def __init__(self, entries: list[tuple[str, str, str]]):
        table: dict[tuple[str, str], list[str]] = {}
        for lemma, pos, sense in entries:
            if pos not in POS_TAGS:
                raise ValueError(f"bad pos {pos!r} for lemma {lemma!r}")
            table.setdefault((_lemma_key(lemma), pos), []).append(sense)
        self.table = {key: tuple(sorted(set(senses))) for key, senses in table.items()}

    @classmethod
    def from_file(cls, path: str | Path) -> "WordnetLexicon":
        entries: list[tuple[str, str, str]] = []
        for number, line in enumerate(
            Path(path).read_text("utf-8").splitlines(), start=1
        ):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{number}: expected lemma<TAB>pos<TAB>sense")
            entries.append((parts[0].strip(), parts[1].strip(), parts[2].strip()))
        return cls(entries)

    def lookup(self, lemma: str, pos: str) -> list[RetrievalCandidate]:
        if not lemma.strip():
            raise ValueError("lemma is empty after trimming")
        if pos not in POS_TAGS:
            raise ValueError(f"pos must be one of {POS_TAGS}, got {pos!r}")
        key = _lemma_key(lemma)
        return [
            RetrievalCandidate(
                kind=EntityKind.SYNSET,
                surface=lemma,
                code=f"{key}.{pos}.{sense}",
                pos=pos,
            )
            for sense in self.table.get((key, pos), ())
        ]

    def senses(self, lemma: str, pos: str) -> tuple[str, ...]:
        return self.table.get((_lemma_key(lemma), pos), ())


@lru_cache(maxsize=1)
def packaged_wordnet_lexicon() -> WordnetLexicon:
    return WordnetLexicon.from_file(data_path("wordnet_lexicon.tsv"))


def wordnet_lookup(
    lemma: str, pos: str, lexicon: WordnetLexicon | None = None
) -> list[RetrievalCandidate]:
    """All senses of `lemma` restricted to `pos`, packaged lexicon by default."""
    if lexicon is None:
        lexicon = packaged_wordnet_lexicon()
    return lexicon.lookup(lemma, pos)
