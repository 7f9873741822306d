"""Batch-score text pairs with pretrained sequence-pair classifiers.

Each model produces one teacher score file: header
`#teacher-scores v1 teacher=<id> kind=logits`, rows
`query<TAB>title<TAB>z_pos<TAB>z_neg`, sorted by the UTF-8 bytes of
(query, title) with unique keys. The format is shared with the distillation
toolkit's transfer-set builder; this package only speaks the file format
and never imports the toolkit.

Query and title are encoded as a standard sentence pair (the tokenizer
inserts its [CLS]/[SEP] conventions), truncated to max_length with the
truncations counted. Scoring runs in eval mode under inference_mode on a
fixed batch partitioning, so output files are byte-stable for a fixed
model, corpus, and batch size.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer

HEADER_PREFIX = "#teacher-scores v1"
DEFAULT_MAX_LENGTH = 128
DEFAULT_BATCH_SIZE = 32


class ScorerError(Exception):
    """Unusable configuration, corpus, or model."""


@dataclass(frozen=True)
class ScorerConfig:
    """models are pretrained pair-classifier checkpoints (local paths or hub
    identifiers); each must expose exactly two classification logits."""

    models: tuple[str, ...]
    out_dir: str
    max_length: int = DEFAULT_MAX_LENGTH
    batch_size: int = DEFAULT_BATCH_SIZE
    device: str = "cpu"
    positive_class: int = 1
    teacher_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.models:
            raise ScorerError("need at least one model")
        if self.max_length <= 2:
            raise ScorerError(f"max_length must exceed 2 (separator overhead), got {self.max_length}")
        if self.batch_size < 1:
            raise ScorerError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.positive_class not in (0, 1):
            raise ScorerError(f"positive_class must be 0 or 1, got {self.positive_class}")
        if self.teacher_ids and len(self.teacher_ids) != len(self.models):
            raise ScorerError("teacher_ids must match models one to one")

    def teacher_id(self, index: int) -> str:
        if self.teacher_ids:
            return self.teacher_ids[index]
        stem = Path(str(self.models[index]).rstrip("/")).name or f"model{index}"
        slug = re.sub(r"\s+", "-", stem)
        return f"{slug}-{index}" if list(self.models).count(self.models[index]) > 1 else slug


@dataclass
class ScoreStats:
    teacher_id: str
    path: str
    pairs: int
    truncated: int


def _check_unique(pairs: Sequence[tuple[str, str]]) -> None:
    seen = set()
    for query, title in pairs:
        key = (query, title)
        if key in seen:
            raise ScorerError(f"duplicate pair {key!r}: keys must be unique "
                              "for the downstream join")
        seen.add(key)


def _load(model_path: str, device: str):
    try:
        tokenizer = AutoTokenizer.from_pretrained(model_path)
        model = AutoModelForSequenceClassification.from_pretrained(model_path)
    except Exception as exc:
        raise ScorerError(f"cannot load model {model_path!r}: {exc}") from exc
    num_labels = getattr(model.config, "num_labels", None)
    if num_labels != 2:
        raise ScorerError(f"model {model_path!r} has {num_labels} labels; "
                          "a pair relevance teacher must have exactly 2")
    model.to(device)
    model.eval()
    return tokenizer, model


def _score_with_model(tokenizer, model, pairs, config: ScorerConfig):
    """Returns (logit pairs aligned with `pairs`, truncated count)."""
    truncated = 0
    logits_out: list[tuple[float, float]] = []
    device = config.device
    for start in range(0, len(pairs), config.batch_size):
        batch = pairs[start:start + config.batch_size]
        queries = [q for q, _ in batch]
        titles = [t for _, t in batch]
        full = tokenizer(queries, titles, truncation=False, padding=False)
        truncated += sum(len(ids) > config.max_length for ids in full["input_ids"])
        encoded = tokenizer(queries, titles, truncation=True,
                            max_length=config.max_length, padding=True,
                            return_tensors="pt").to(device)
        with torch.inference_mode():
            logits = model(**encoded).logits.to(torch.float64).cpu()
        z_pos = logits[:, config.positive_class]
        z_neg = logits[:, 1 - config.positive_class]
        logits_out.extend((float(p), float(n)) for p, n in zip(z_pos, z_neg))
    return logits_out, truncated


def _write_scores(path, teacher_id: str, rows: Iterable[tuple[str, str, float, float]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{HEADER_PREFIX} teacher={teacher_id} kind=logits\n")
        for query, title, z_pos, z_neg in rows:
            fh.write(f"{query}\t{title}\t{z_pos!r}\t{z_neg!r}\n")


def score_corpus(config: ScorerConfig, pairs: Sequence[tuple[str, str]]) -> list[ScoreStats]:
    """Score every pair with every configured model, one output file each.

    An empty corpus produces header-only files. Scoring K models over the
    same corpus yields K files ready for ensemble stacking downstream.
    """
    pairs = [(str(q), str(t)) for q, t in pairs]
    _check_unique(pairs)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    order = sorted(range(len(pairs)),
                   key=lambda i: (pairs[i][0].encode("utf-8"), pairs[i][1].encode("utf-8")))
    results: list[ScoreStats] = []
    for index, model_path in enumerate(config.models):
        tokenizer, model = _load(model_path, config.device)
        logits, truncated = _score_with_model(tokenizer, model, pairs, config)
        teacher_id = config.teacher_id(index)
        path = out_dir / f"scores-{teacher_id}.tsv"
        _write_scores(path, teacher_id,
                      ((pairs[i][0], pairs[i][1], logits[i][0], logits[i][1]) for i in order))
        results.append(ScoreStats(teacher_id=teacher_id, path=str(path),
                                  pairs=len(pairs), truncated=truncated))
        del model
    return results
