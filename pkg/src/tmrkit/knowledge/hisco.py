"""Occupation code lookups against a local historical classification table."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from tmrkit.assets import data_path
from tmrkit.knowledge.types import EntityKind, RetrievalCandidate, fold


@dataclass(frozen=True)
class _Row:
    code: str
    title: str
    folded: str


class HiscoTable:
    """Code/title pairs, queried with diacritic folding and casefolding.

    Exact title matches come first in table order, then rows where one of
    query and title is a prefix of the other; everything else is no match.
    """

    def __init__(self, rows: list[tuple[str, str]]):
        self.rows = tuple(_Row(code, title, fold(title)) for code, title in rows)

    @classmethod
    def from_file(cls, path: str | Path) -> "HiscoTable":
        rows: list[tuple[str, str]] = []
        for number, line in enumerate(
            Path(path).read_text("utf-8").splitlines(), start=1
        ):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{number}: expected code<TAB>title")
            rows.append((parts[0].strip(), parts[1].strip()))
        return cls(rows)

    def lookup(self, occupation: str) -> list[RetrievalCandidate]:
        if not occupation.strip():
            raise ValueError("occupation is empty after trimming")
        folded = fold(occupation)
        exact: list[_Row] = []
        loose: list[_Row] = []
        for row in self.rows:
            if row.folded == folded:
                exact.append(row)
            elif row.folded.startswith(folded) or folded.startswith(row.folded):
                loose.append(row)
        return [
            RetrievalCandidate(kind=EntityKind.HISCO, surface=occupation, code=row.code)
            for row in exact + loose
        ]


@lru_cache(maxsize=1)
def packaged_hisco_table() -> HiscoTable:
    return HiscoTable.from_file(data_path("hisco_table.tsv"))


def hisco_lookup(
    occupation: str, table: HiscoTable | None = None
) -> list[RetrievalCandidate]:
    """Look an occupation up in `table`, defaulting to the packaged one."""
    if table is None:
        table = packaged_hisco_table()
    return table.lookup(occupation)
