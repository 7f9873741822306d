"""Readers and writers for the plain text-pair corpus formats.

Pair file: UTF-8, one `query<TAB>title` per line. Lines starting with `#`
are comments. Malformed lines are skipped and tallied, so billion-row logs
with occasional garbage stream through without aborting.

Labeled pair file: `query<TAB>title<TAB>label` with header `#labeled v1`,
label a real in [0, 1]. Used for evaluation, so violations are hard errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from ffdistill.errors import FormatError

PAIR_HEADER = "#pairs v1"
LABELED_HEADER = "#labeled v1"


@dataclass
class PairReader:
    """Iterates (query, title) pairs from a pair file, tallying skipped lines."""

    path: str
    skipped: int = 0
    read: int = 0

    def __iter__(self) -> Iterator[tuple[str, str]]:
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) != 2:
                    self.skipped += 1
                    continue
                self.read += 1
                yield fields[0], fields[1]


def read_pairs(path) -> list[tuple[str, str]]:
    return list(PairReader(str(path)))


def write_pairs(pairs, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(PAIR_HEADER + "\n")
        for query, title in pairs:
            fh.write(f"{query}\t{title}\n")


def read_labeled(path) -> list[tuple[str, str, float]]:
    """Read (query, title, label) rows; any malformed line is an error."""
    rows: list[tuple[str, str, float]] = []
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != LABELED_HEADER:
            raise FormatError(path, 1, f"expected header {LABELED_HEADER!r}, got {first!r}")
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise FormatError(path, line_no, f"expected 3 tab-separated fields, got {len(fields)}")
            try:
                label = float(fields[2])
            except ValueError:
                raise FormatError(path, line_no, f"label {fields[2]!r} is not a number") from None
            if not 0.0 <= label <= 1.0:
                raise FormatError(path, line_no, f"label {label} outside [0, 1]")
            rows.append((fields[0], fields[1], label))
    return rows


def write_labeled(rows, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(LABELED_HEADER + "\n")
        for query, title, label in rows:
            fh.write(f"{query}\t{title}\t{float(label)!r}\n")
