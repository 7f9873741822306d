"""Score (query, title) corpora with pretrained sequence-pair classifiers
and export the logits as teacher score files for the distillation toolkit."""

from pairscorer.scorer import ScoreStats, ScorerConfig, ScorerError, score_corpus

__version__ = "0.1.0"

__all__ = ["ScorerConfig", "ScoreStats", "ScorerError", "score_corpus"]
