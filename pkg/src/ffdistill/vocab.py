"""Frequency-filtered token vocabulary over a streamed pair corpus.

Both sides of every pair contribute counts. Tokens below min_count are
dropped; ids are assigned by descending count with ties broken by ascending
UTF-8 byte order, so two builds over the same records (in any order) produce
identical vocabularies.

File format: UTF-8 text, header `#cwub-vocab v1 size=<N>`, then one
`token<TAB>id<TAB>count` line per entry ordered by id ascending.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from ffdistill.errors import FormatError
from ffdistill.tokenizer import DEFAULT_JOINER, token_set, tokenize

VOCAB_HEADER_PREFIX = "#cwub-vocab v1 size="

DEFAULT_MIN_COUNT = 5


@dataclass(frozen=True)
class Vocab:
    """Token to dense-id map with corpus counts. Ids are exactly 0..size-1."""

    tokens: tuple[str, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.tokens)})
        if len(self._index) != len(self.tokens):
            raise ValueError("duplicate token in vocabulary")
        if len(self.counts) != len(self.tokens):
            raise ValueError("counts and tokens length mismatch")

    @property
    def size(self) -> int:
        return len(self.tokens)

    def lookup(self, token: str) -> Optional[int]:
        """Dense id of a retained token, or None (caller drops OOV tokens)."""
        return self._index.get(token)

    def count(self, token: str) -> int:
        idx = self._index.get(token)
        return 0 if idx is None else self.counts[idx]

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def __len__(self) -> int:
        return len(self.tokens)


def _ordering_key(item: tuple[str, int]):
    token, count = item
    return (-count, token.encode("utf-8"))


def count_tokens(records: Iterable[tuple[str, str]], joiner: str = DEFAULT_JOINER) -> Counter:
    """Exact token counts over both sides of every record."""
    counts: Counter = Counter()
    for query, title in records:
        counts.update(token_set(tokenize(query, joiner)))
        counts.update(token_set(tokenize(title, joiner)))
    return counts


def merge_counts(*parts: Counter) -> Counter:
    """Merge per-shard counters; merging equals single-threaded counting."""
    total: Counter = Counter()
    for part in parts:
        total.update(part)
    return total


def vocab_from_counts(counts: Counter, min_count: int = DEFAULT_MIN_COUNT,
                      max_size: Optional[int] = None) -> Vocab:
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    if max_size is not None and max_size < 1:
        raise ValueError(f"max_size must be >= 1, got {max_size}")
    kept = [(t, c) for t, c in counts.items() if c >= min_count]
    kept.sort(key=_ordering_key)
    if max_size is not None:
        kept = kept[:max_size]
    return Vocab(tuple(t for t, _ in kept), tuple(c for _, c in kept))


def build_vocab(records: Iterable[tuple[str, str]], min_count: int = DEFAULT_MIN_COUNT,
                max_size: Optional[int] = None, joiner: str = DEFAULT_JOINER) -> Vocab:
    """Count, filter, and rank tokens from a stream of (query, title) records.

    An empty corpus yields an empty (valid) vocabulary. Unreadable records
    are the corpus reader's concern; see corpus.PairReader, which skips and
    tallies them.
    """
    return vocab_from_counts(count_tokens(records, joiner), min_count, max_size)


def save_vocab(vocab: Vocab, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{VOCAB_HEADER_PREFIX}{vocab.size}\n")
        for idx, (token, count) in enumerate(zip(vocab.tokens, vocab.counts)):
            fh.write(f"{token}\t{idx}\t{count}\n")


def load_vocab(path) -> Vocab:
    """Parse a vocab file, re-validating every invariant (dense ids,
    no duplicates, deterministic ordering)."""
    tokens: list[str] = []
    counts: list[int] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(VOCAB_HEADER_PREFIX):
            raise FormatError(path, 1, f"expected header {VOCAB_HEADER_PREFIX!r}..., got {header!r}")
        try:
            declared_size = int(header[len(VOCAB_HEADER_PREFIX):])
        except ValueError:
            raise FormatError(path, 1, f"unparseable size in header {header!r}") from None
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise FormatError(path, line_no, f"expected 3 tab-separated fields, got {len(fields)}")
            token, id_text, count_text = fields
            if not token:
                raise FormatError(path, line_no, "empty token")
            try:
                token_id = int(id_text)
                count = int(count_text)
            except ValueError:
                raise FormatError(path, line_no, f"non-integer id or count in {line!r}") from None
            if token in seen:
                raise FormatError(path, line_no, f"duplicate token {token!r}")
            if token_id != len(tokens):
                raise FormatError(path, line_no, f"ids not dense: expected {len(tokens)}, got {token_id}")
            if count < 1:
                raise FormatError(path, line_no, f"count {count} < 1")
            if tokens and _ordering_key((token, count)) < _ordering_key((tokens[-1], counts[-1])):
                raise FormatError(path, line_no, "entries violate count-descending, byte-ascending order")
            seen.add(token)
            tokens.append(token)
            counts.append(count)
    if len(tokens) != declared_size:
        raise FormatError(path, 1, f"header declares size={declared_size} but file has {len(tokens)} entries")
    return Vocab(tuple(tokens), tuple(counts))
