"""Shared numerically-stable primitives."""

from __future__ import annotations

import math

import numpy as np


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Logistic function, overflow-safe for any finite input."""
    x = np.asarray(x)
    out = np.empty_like(x, dtype=x.dtype if x.dtype.kind == "f" else np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid_scalar(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    ex = math.exp(x)
    return ex / (1.0 + ex)


def bce_with_logits(logits: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Sigmoid cross entropy in the max-form identity:
    max(x, 0) − x·y + log(1 + e^(−|x|)), finite for any logit magnitude."""
    x = np.asarray(logits)
    y = np.asarray(targets)
    return np.maximum(x, 0) - x * y + np.log1p(np.exp(-np.abs(x)))
