"""End-to-end inference latency measurement.

Scores a fixed number of batches through the full pipeline (tokenize, embed,
forward) after warmup, on a monotonic clock. Every batch's scores feed a
running SHA-256 checksum, so the scored work cannot be optimized away and
two runs over the same model and corpus must agree exactly.
"""

from __future__ import annotations

import hashlib
import itertools
import time
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from ffdistill.embedding import embed_ids, encode_tokens
from ffdistill.errors import InputError
from ffdistill.numerics import sigmoid_scalar
from ffdistill.student import StudentModel, forward
from ffdistill.tokenizer import DEFAULT_JOINER, tokenize
from ffdistill.vocab import Vocab

DEFAULT_BATCHES = 100
DEFAULT_BATCH_SIZE = 128
DEFAULT_WARMUP = 5


@dataclass(frozen=True)
class BenchReport:
    batches: int
    batch_size: int
    total_examples: int
    warmup_batches: int
    tokenize_seconds: float
    embed_seconds: float
    forward_seconds: float
    total_seconds: float
    examples_per_second: float
    threads: int
    corpus_cycled: bool
    checksum: str

    def as_text(self) -> str:
        return "".join(f"{k}\t{v}\n" for k, v in vars(self).items())

    def as_tsv_row(self) -> str:
        """Single machine-readable row for CI trend tracking."""
        values = vars(self)
        return ("\t".join(str(values[k]) for k in values) + "\n")

    def tsv_header(self) -> str:
        return "\t".join(vars(self)) + "\n"


def _score_batch(model: StudentModel, vocab: Vocab, batch, joiner: str,
                 timers: dict, digest) -> None:
    t0 = time.perf_counter()
    sequences = [(tokenize(q, joiner), tokenize(t, joiner)) for q, t in batch]
    t1 = time.perf_counter()
    embedded = [(embed_ids(model.table, encode_tokens(qs, vocab)),
                 embed_ids(model.table, encode_tokens(ts, vocab)))
                for qs, ts in sequences]
    t2 = time.perf_counter()
    scores = np.array([sigmoid_scalar(forward(model, q, t)) for q, t in embedded])
    t3 = time.perf_counter()
    timers["tokenize"] += t1 - t0
    timers["embed"] += t2 - t1
    timers["forward"] += t3 - t2
    digest.update(scores.astype("<f8").tobytes())


def run_bench(model: StudentModel, vocab: Vocab, pairs,
              batches: int = DEFAULT_BATCHES, batch_size: int = DEFAULT_BATCH_SIZE,
              warmup: int = DEFAULT_WARMUP, threads: int = 1,
              joiner: str = DEFAULT_JOINER) -> BenchReport:
    """Score exactly batches × batch_size examples after warmup, cycling the
    corpus if it is smaller than the protocol needs (and reporting that).

    threads caps the BLAS thread pool while scoring; the default 1 gives
    comparable single-core numbers across machines.
    """
    if batches < 1 or batch_size < 1 or warmup < 0:
        raise ValueError("batches and batch_size must be >= 1, warmup >= 0")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    pairs = list(pairs)
    if not pairs:
        raise InputError("benchmark corpus is empty")
    needed = (batches + warmup) * batch_size
    cycled = len(pairs) < batches * batch_size
    stream = itertools.islice(itertools.cycle(pairs), needed)
    batch_list = []
    for _ in range(batches + warmup):
        batch_list.append([next(stream) for _ in range(batch_size)])

    timers = {"tokenize": 0.0, "embed": 0.0, "forward": 0.0}
    digest = hashlib.sha256()
    with threadpool_limits(limits=threads):
        warm_timers = {"tokenize": 0.0, "embed": 0.0, "forward": 0.0}
        for batch in batch_list[:warmup]:
            _score_batch(model, vocab, batch, joiner, warm_timers, hashlib.sha256())
        start = time.perf_counter()
        for batch in batch_list[warmup:]:
            _score_batch(model, vocab, batch, joiner, timers, digest)
        total = time.perf_counter() - start

    total_examples = batches * batch_size
    return BenchReport(
        batches=batches,
        batch_size=batch_size,
        total_examples=total_examples,
        warmup_batches=warmup,
        tokenize_seconds=timers["tokenize"],
        embed_seconds=timers["embed"],
        forward_seconds=timers["forward"],
        total_seconds=total,
        examples_per_second=total_examples / total,
        threads=threads,
        corpus_cycled=cycled,
        checksum=digest.hexdigest(),
    )
