"""Distillation toolkit: train and serve a minimal feed-forward student that
imitates an expensive text-pair classifier.

Pipeline: tokenize raw text pairs, build a frequency-filtered vocabulary,
soften and stack teacher scores into a transfer set, train a fully-connected
or two-tower student on the soft labels, then evaluate and benchmark it.
"""

from ffdistill.tokenizer import TokenSequence, token_set, tokenize
from ffdistill.vocab import Vocab, build_vocab, load_vocab, save_vocab
from ffdistill.embedding import (
    EmbeddingTable,
    SentenceEmbedding,
    embed_sentence,
    embedding_distance,
    init_table,
)
from ffdistill.student import (
    AdagradState,
    StudentConfig,
    StudentModel,
    init_model,
    load_checkpoint,
    predict_batch,
    save_checkpoint,
    train,
)
from ffdistill.distill import (
    BehaviorRecord,
    TeacherScoreRecord,
    TransferExample,
    behavior_filter,
    build_transfer_set,
    soften,
    stack_scores,
)
from ffdistill.metrics import MetricsReport, auc, moments, pcc, threshold_metrics
from ffdistill.bench import BenchReport, run_bench

__version__ = "0.1.0"

__all__ = [
    "TokenSequence",
    "tokenize",
    "token_set",
    "Vocab",
    "build_vocab",
    "save_vocab",
    "load_vocab",
    "EmbeddingTable",
    "SentenceEmbedding",
    "init_table",
    "embed_sentence",
    "embedding_distance",
    "StudentConfig",
    "StudentModel",
    "AdagradState",
    "init_model",
    "train",
    "predict_batch",
    "save_checkpoint",
    "load_checkpoint",
    "TeacherScoreRecord",
    "TransferExample",
    "BehaviorRecord",
    "soften",
    "stack_scores",
    "behavior_filter",
    "build_transfer_set",
    "MetricsReport",
    "auc",
    "threshold_metrics",
    "pcc",
    "moments",
    "BenchReport",
    "run_bench",
]
