"""Synthetic fixture generator: corpora scored by a fixed random linear
teacher, in the real file formats.

The teacher assigns each word a fixed weight; a pair's logit margin is the
sum of the weights of every word occurrence in query and title. Exported
logits are (margin/2, −margin/2), so at unit temperature the soft label is
exactly the teacher's logistic probability. Desk-scale testing of the whole
pipeline therefore needs no external models or proprietary data.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ffdistill.corpus import write_labeled, write_pairs
from ffdistill.distill import TeacherScoreRecord, write_teacher_scores
from ffdistill.numerics import sigmoid

DEFAULT_WORDS = 5000
DEFAULT_PAIRS = 50_000
DEFAULT_HOLDOUT = 5000
# std of per-word weights; with ~7.5 word occurrences per pair the margin
# std lands near 2.5, spreading teacher scores over (0, 1).
WEIGHT_SCALE = 0.9


@dataclass(frozen=True)
class SynthSpec:
    words: int = DEFAULT_WORDS
    pairs: int = DEFAULT_PAIRS
    holdout: int = DEFAULT_HOLDOUT
    teachers: int = 1
    seed: int = 0
    query_words: tuple[int, int] = (1, 3)
    title_words: tuple[int, int] = (3, 8)

    def __post_init__(self):
        if self.words < 10 or self.pairs < 1 or self.holdout < 0:
            raise ValueError("need words >= 10, pairs >= 1, holdout >= 0")
        if self.teachers < 1:
            raise ValueError("need at least one teacher")


def _make_words(rng: np.random.Generator, count: int) -> list[str]:
    letters = np.array(list(string.ascii_lowercase))
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < count:
        length = int(rng.integers(3, 9))
        word = "".join(letters[rng.integers(0, 26, size=length)])
        if word not in seen:
            seen.add(word)
            words.append(word)
    return words


def _make_pairs(rng, words, spec, count):
    pairs: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    lo_q, hi_q = spec.query_words
    lo_t, hi_t = spec.title_words
    while len(pairs) < count:
        query = " ".join(words[i] for i in rng.integers(0, len(words),
                                                        size=rng.integers(lo_q, hi_q + 1)))
        title = " ".join(words[i] for i in rng.integers(0, len(words),
                                                        size=rng.integers(lo_t, hi_t + 1)))
        key = (query, title)
        if key not in seen:
            seen.add(key)
            pairs.append(key)
    return pairs


class LinearTeacher:
    """Deterministic bag-of-words scorer: margin = Σ weight[word]."""

    def __init__(self, words: list[str], weights):
        self.weight_of = {w: float(x) for w, x in zip(words, weights)}

    def margin(self, query: str, title: str) -> float:
        total = 0.0
        for word in query.split() + title.split():
            total += self.weight_of.get(word, 0.0)
        return total

    def logits(self, query: str, title: str) -> tuple[float, float]:
        m = self.margin(query, title)
        return (m / 2.0, -m / 2.0)

    def probability(self, query: str, title: str) -> float:
        return float(sigmoid(np.float64(self.margin(query, title))))


def make_teachers(spec: SynthSpec) -> tuple[list[str], list[LinearTeacher]]:
    """The word list plus one base teacher and, for K > 1, perturbed
    variants standing in for independently trained peers."""
    rng = np.random.default_rng(spec.seed)
    words = _make_words(rng, spec.words)
    base = rng.normal(0.0, WEIGHT_SCALE, size=spec.words)
    teachers = [LinearTeacher(words, base)]
    for _ in range(spec.teachers - 1):
        jitter = rng.normal(0.0, WEIGHT_SCALE / 4.0, size=spec.words)
        teachers.append(LinearTeacher(words, base + jitter))
    return words, teachers


def generate_fixture(out_dir, spec: SynthSpec = SynthSpec()) -> dict[str, str]:
    """Write corpus, per-teacher score files, and a teacher-labeled holdout.

    Returns the paths keyed by role: corpus, scores (list), holdout.
    Output is a pure function of the SynthSpec, so equal specs always
    produce byte-identical files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)
    words, teachers = make_teachers(spec)
    # A fresh generator stream for pairs keeps them decoupled from the
    # teacher draw so changing K never changes the corpus.
    pair_rng = np.random.default_rng(spec.seed + 1)
    all_pairs = _make_pairs(pair_rng, words, spec, spec.pairs + spec.holdout)
    del rng
    train_pairs = all_pairs[:spec.pairs]
    holdout_pairs = all_pairs[spec.pairs:]

    corpus_path = out / "corpus.tsv"
    write_pairs(train_pairs, corpus_path)

    sorted_train = sorted(train_pairs, key=lambda p: (p[0].encode(), p[1].encode()))
    score_paths = []
    for k, teacher in enumerate(teachers):
        teacher_id = f"synth{k}"
        records = [TeacherScoreRecord(q, t, teacher_id, logits=teacher.logits(q, t))
                   for q, t in sorted_train]
        path = out / f"scores-{teacher_id}.tsv"
        write_teacher_scores(records, path, teacher_id=teacher_id, kind="logits")
        score_paths.append(str(path))

    holdout_path = out / "holdout.tsv"
    base = teachers[0]
    write_labeled([(q, t, base.probability(q, t)) for q, t in holdout_pairs], holdout_path)

    return {"corpus": str(corpus_path), "scores": score_paths, "holdout": str(holdout_path)}
