"""Sentence embeddings: sum the retained tokens' vectors and divide by √n.

Out-of-vocabulary tokens are dropped and excluded from n; n counts token
occurrences, not distinct tokens. A sentence with no retained tokens embeds
to the zero vector so that all-OOV production queries still score.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ffdistill.errors import NumericError
from ffdistill.tokenizer import TokenSequence, token_set
from ffdistill.vocab import Vocab

DEFAULT_DIM = 64
INIT_SCALE = 0.05

DISTANCE_METRICS = ("cosine", "euclidean", "manhattan")


@dataclass
class EmbeddingTable:
    """One dense vector per vocabulary id; row count must equal vocab size."""

    rows: np.ndarray  # (vocab_size, dim)

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])

    @property
    def vocab_size(self) -> int:
        return int(self.rows.shape[0])


def init_table(vocab_size: int, dim: int = DEFAULT_DIM, seed: int = 0,
               dtype=np.float32) -> EmbeddingTable:
    """Seeded uniform init in [-0.05, 0.05] per entry."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    rows = rng.uniform(-INIT_SCALE, INIT_SCALE, size=(vocab_size, dim)).astype(dtype)
    return EmbeddingTable(rows)


@dataclass
class SentenceEmbedding:
    vector: np.ndarray
    retained_count: int


def encode_tokens(seq: TokenSequence, vocab: Vocab) -> np.ndarray:
    """Retained vocab ids of a token sequence, in order, duplicates kept."""
    ids = [vocab.lookup(tok) for tok in token_set(seq)]
    return np.array([i for i in ids if i is not None], dtype=np.int64)


def embed_ids(table: EmbeddingTable, ids: np.ndarray) -> SentenceEmbedding:
    """Σ row / √n over the given ids. Empty ids give the zero vector.

    The per-sentence sum depends only on that sentence's own rows, so
    embeddings are identical no matter how sentences are batched.
    """
    n = len(ids)
    if n == 0:
        return SentenceEmbedding(np.zeros(table.dim, dtype=table.rows.dtype), 0)
    vec = table.rows[ids].sum(axis=0) / np.sqrt(np.asarray(n, dtype=table.rows.dtype))
    return SentenceEmbedding(vec, n)


def embed_sentence(seq: TokenSequence, vocab: Vocab, table: EmbeddingTable) -> SentenceEmbedding:
    if table.vocab_size != vocab.size:
        raise NumericError(
            f"embedding table has {table.vocab_size} rows but vocab has {vocab.size} entries")
    return embed_ids(table, encode_tokens(seq, vocab))


def embedding_distance(a: SentenceEmbedding, b: SentenceEmbedding, metric: str) -> float:
    """cosine: 1 − a·b/(‖a‖‖b‖); euclidean: ‖a−b‖₂; manhattan: ‖a−b‖₁."""
    va = np.asarray(a.vector, dtype=np.float64)
    vb = np.asarray(b.vector, dtype=np.float64)
    if va.shape != vb.shape:
        raise NumericError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    if metric == "cosine":
        na = np.linalg.norm(va)
        nb = np.linalg.norm(vb)
        if na == 0.0 or nb == 0.0:
            raise NumericError("cosine distance is undefined for a zero vector")
        # rounding can land a hair below 0 for near-identical vectors
        return max(0.0, float(1.0 - float(va @ vb) / (na * nb)))
    if metric == "euclidean":
        return float(np.linalg.norm(va - vb))
    if metric == "manhattan":
        return float(np.abs(va - vb).sum())
    raise ValueError(f"unknown metric {metric!r}; expected one of {DISTANCE_METRICS}")


def export_embedding_heatmap(texts, vocab: Vocab, table: EmbeddingTable, path,
                             joiner=None) -> None:
    """One row per text: the text, then its embedding values, tab-separated.

    Every text must keep at least one in-vocab token; an all-OOV text would
    plot as a meaningless zero row, so it is rejected by name.
    """
    from ffdistill.tokenizer import DEFAULT_JOINER, tokenize

    joiner = DEFAULT_JOINER if joiner is None else joiner
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("text\t" + "\t".join(f"e{i}" for i in range(table.dim)) + "\n")
            for text in texts:
                emb = embed_sentence(tokenize(text, joiner), vocab, table)
                if emb.retained_count == 0:
                    raise NumericError(f"text {text!r} has no in-vocab tokens")
                values = "\t".join(repr(float(v)) for v in emb.vector)
                fh.write(f"{text}\t{values}\n")
    except OSError as exc:
        raise OSError(f"cannot write heatmap to {path}: {exc}") from exc
