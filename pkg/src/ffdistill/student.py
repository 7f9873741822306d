"""Feed-forward student networks: definition, Adagrad training on soft
labels, batch scoring, and versioned binary checkpoints.

Two topologies share one embedding table. The fully-connected network maps
the concatenated query/title embeddings through ReLU hidden layers to a
single logit; the two-tower network runs each side through its own ReLU
stack and takes the dot product of the tower outputs. The serving score is
the logistic of the logit.

Numerical paths are deliberately split: training batches use matrix-matrix
products for speed, while scoring walks examples one at a time so that
results are bitwise identical no matter how a workload is batched (BLAS
matrix kernels round differently per batch shape).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ffdistill.embedding import (
    INIT_SCALE,
    EmbeddingTable,
    SentenceEmbedding,
    embed_ids,
    encode_tokens,
)
from ffdistill.errors import InputError, NumericError, ToolkitError
from ffdistill.numerics import bce_with_logits, sigmoid, sigmoid_scalar
from ffdistill.tokenizer import DEFAULT_JOINER, tokenize
from ffdistill.vocab import Vocab

TOPOLOGY_FC = "fully_connected"
TOPOLOGY_DD = "deep_dot"
TOPOLOGIES = (TOPOLOGY_FC, TOPOLOGY_DD)

DEFAULT_HIDDEN_SIZES = (1024, 256, 128, 64)
DEFAULT_LEARNING_RATE = 0.05
DEFAULT_BATCH_SIZE = 256
ADAGRAD_EPSILON = 1e-8

CHECKPOINT_MAGIC = b"B2DNN1"
_TOPOLOGY_TAGS = {TOPOLOGY_FC: b"F", TOPOLOGY_DD: b"D"}
_TAG_TOPOLOGIES = {v: k for k, v in _TOPOLOGY_TAGS.items()}


class CheckpointError(ToolkitError):
    """Base class for checkpoint load failures."""


class CheckpointVersionError(CheckpointError):
    """Magic or topology tag not recognized."""


class CheckpointTruncatedError(CheckpointError):
    """File ends before the declared parameters."""


class CheckpointShapeError(CheckpointError):
    """Declared shapes are inconsistent with the payload."""


class TrainingDivergedError(NumericError):
    """A gradient or loss went non-finite during training."""

    def __init__(self, message, block=None, batch_index=None):
        self.block = block
        self.batch_index = batch_index
        super().__init__(message)


@dataclass(frozen=True)
class StudentConfig:
    """Training happens directly on the transfer set's soft labels; any
    temperature was already applied when the transfer set was built."""

    topology: str = TOPOLOGY_FC
    hidden_sizes: tuple[int, ...] = DEFAULT_HIDDEN_SIZES
    embedding_dim: int = 64
    learning_rate: float = DEFAULT_LEARNING_RATE
    epochs: int = 5
    batch_size: int = DEFAULT_BATCH_SIZE
    seed: int = 0
    # float32 matches the checkpoint payload bit-for-bit; float64 exists for
    # gradient verification and is downcast on save.
    dtype: str = "float32"

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"topology must be one of {TOPOLOGIES}, got {self.topology!r}")
        if not self.hidden_sizes or any(h < 1 for h in self.hidden_sizes):
            raise ValueError(f"hidden_sizes must be nonempty positives, got {self.hidden_sizes}")
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        if self.embedding_dim < 1:
            raise ValueError(f"embedding_dim must be >= 1, got {self.embedding_dim}")
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if self.dtype not in ("float32", "float64"):
            raise ValueError(f"dtype must be float32 or float64, got {self.dtype!r}")

    @property
    def np_dtype(self):
        return np.float32 if self.dtype == "float32" else np.float64


@dataclass
class StudentModel:
    """Embedding table plus dense layers for one topology.

    fully_connected: weights[i]/biases[i] are the hidden layers
    (2·dim → h1 → … → hk) followed by the final hk → 1 logit map.
    deep_dot: weights/biases form the query tower (dim → h1 → … → hk),
    t_weights/t_biases the title tower; the logit is the dot product of
    the two tower outputs.
    """

    config: StudentConfig
    table: EmbeddingTable
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    t_weights: Optional[list[np.ndarray]] = None
    t_biases: Optional[list[np.ndarray]] = None

    def param_blocks(self) -> list[tuple[str, np.ndarray]]:
        blocks = [("embedding", self.table.rows)]
        if self.config.topology == TOPOLOGY_FC:
            for i, (w, b) in enumerate(zip(self.weights, self.biases)):
                blocks += [(f"fc_w{i}", w), (f"fc_b{i}", b)]
        else:
            for i, (w, b) in enumerate(zip(self.weights, self.biases)):
                blocks += [(f"q_w{i}", w), (f"q_b{i}", b)]
            for i, (w, b) in enumerate(zip(self.t_weights, self.t_biases)):
                blocks += [(f"t_w{i}", w), (f"t_b{i}", b)]
        return blocks

    def copy(self) -> "StudentModel":
        return StudentModel(
            config=self.config,
            table=EmbeddingTable(self.table.rows.copy()),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            t_weights=None if self.t_weights is None else [w.copy() for w in self.t_weights],
            t_biases=None if self.t_biases is None else [b.copy() for b in self.t_biases],
        )

    def load_params_from(self, other: "StudentModel") -> None:
        for (_, dst), (_, src) in zip(self.param_blocks(), other.param_blocks()):
            np.copyto(dst, src)


def _layer_dims(config: StudentConfig) -> list[tuple[int, int]]:
    sizes = list(config.hidden_sizes)
    if config.topology == TOPOLOGY_FC:
        widths = [2 * config.embedding_dim] + sizes + [1]
    else:
        widths = [config.embedding_dim] + sizes
    return list(zip(widths[:-1], widths[1:]))


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int, dtype) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out)).astype(dtype)


def init_model(vocab_size: int, config: StudentConfig) -> StudentModel:
    """Seeded init: embedding rows uniform in [-0.05, 0.05], dense weights
    Glorot-uniform, biases zero. Draw order is fixed so a seed pins every
    parameter."""
    dtype = config.np_dtype
    rng = np.random.default_rng(config.seed)
    rows = rng.uniform(-INIT_SCALE, INIT_SCALE,
                       size=(vocab_size, config.embedding_dim)).astype(dtype)
    dims = _layer_dims(config)
    weights = [_glorot(rng, i, o, dtype) for i, o in dims]
    biases = [np.zeros(o, dtype=dtype) for _, o in dims]
    if config.topology == TOPOLOGY_FC:
        return StudentModel(config, EmbeddingTable(rows), weights, biases)
    t_weights = [_glorot(rng, i, o, dtype) for i, o in dims]
    t_biases = [np.zeros(o, dtype=dtype) for _, o in dims]
    return StudentModel(config, EmbeddingTable(rows), weights, biases, t_weights, t_biases)


# ---------------------------------------------------------------------------
# forward


def _check_embedding(model: StudentModel, emb: SentenceEmbedding, side: str) -> np.ndarray:
    vec = np.asarray(emb.vector, dtype=model.config.np_dtype)
    if vec.shape != (model.config.embedding_dim,):
        raise NumericError(
            f"{side} embedding has shape {vec.shape}, model expects ({model.config.embedding_dim},)")
    return vec


def _tower_out(vec: np.ndarray, weights, biases) -> np.ndarray:
    h = vec
    for w, b in zip(weights, biases):
        h = np.maximum(h @ w + b, 0)
    return h


def forward(model: StudentModel, query_emb: SentenceEmbedding,
            title_emb: SentenceEmbedding) -> float:
    """Single-pair logit (no output activation)."""
    q = _check_embedding(model, query_emb, "query")
    t = _check_embedding(model, title_emb, "title")
    if model.config.topology == TOPOLOGY_FC:
        h = np.concatenate([q, t])
        for w, b in zip(model.weights[:-1], model.biases[:-1]):
            h = np.maximum(h @ w + b, 0)
        return float(h @ model.weights[-1][:, 0] + model.biases[-1][0])
    u = _tower_out(q, model.weights, model.biases)
    v = _tower_out(t, model.t_weights, model.t_biases)
    return float(u @ v)


def loss(logit: float, soft_label: float) -> float:
    """Sigmoid cross entropy of one example against a soft target,
    stabilized so large logits never overflow."""
    if not 0.0 <= soft_label <= 1.0:
        raise ValueError(f"soft_label must be in [0, 1], got {soft_label}")
    x = float(logit)
    return max(x, 0.0) - x * float(soft_label) + math.log1p(math.exp(-abs(x)))


# ---------------------------------------------------------------------------
# training (batched matrix path)


def _embed_batch(model: StudentModel, ids_list) -> tuple[np.ndarray, np.ndarray]:
    """Stack per-example embeddings; also return 1/√n per example (0 when
    the example retained no tokens, which zeroes its row gradients)."""
    dtype = model.config.np_dtype
    dim = model.config.embedding_dim
    out = np.zeros((len(ids_list), dim), dtype=dtype)
    inv_sqrt = np.zeros(len(ids_list), dtype=dtype)
    for i, ids in enumerate(ids_list):
        emb = embed_ids(model.table, ids)
        out[i] = emb.vector
        if emb.retained_count:
            inv_sqrt[i] = 1.0 / np.sqrt(np.asarray(emb.retained_count, dtype=dtype))
    return out, inv_sqrt


def _batch_logits(model: StudentModel, Q: np.ndarray, T: np.ndarray):
    """Batched forward returning logits and the caches backward needs."""
    if model.config.topology == TOPOLOGY_FC:
        acts = [np.concatenate([Q, T], axis=1)]
        pre = []
        for w, b in zip(model.weights[:-1], model.biases[:-1]):
            z = acts[-1] @ w + b
            pre.append(z)
            acts.append(np.maximum(z, 0))
        logits = acts[-1] @ model.weights[-1][:, 0] + model.biases[-1][0]
        return logits, (acts, pre)
    q_acts, q_pre = [Q], []
    for w, b in zip(model.weights, model.biases):
        z = q_acts[-1] @ w + b
        q_pre.append(z)
        q_acts.append(np.maximum(z, 0))
    t_acts, t_pre = [T], []
    for w, b in zip(model.t_weights, model.t_biases):
        z = t_acts[-1] @ w + b
        t_pre.append(z)
        t_acts.append(np.maximum(z, 0))
    logits = np.einsum("bi,bi->b", q_acts[-1], t_acts[-1])
    return logits, (q_acts, q_pre, t_acts, t_pre)


def _unpack_batch(batch):
    q_ids = [np.asarray(ex[0], dtype=np.int64) for ex in batch]
    t_ids = [np.asarray(ex[1], dtype=np.int64) for ex in batch]
    labels = np.array([float(ex[2]) for ex in batch])
    if labels.size and (labels.min() < 0.0 or labels.max() > 1.0):
        bad = int(np.argmax((labels < 0) | (labels > 1)))
        raise ValueError(f"soft_label {labels[bad]} at batch index {bad} outside [0, 1]")
    return q_ids, t_ids, labels


def batch_mean_loss(model: StudentModel, batch) -> float:
    """Mean loss over a batch via the training forward path; the quantity
    whose gradient backward_and_step applies."""
    q_ids, t_ids, labels = _unpack_batch(batch)
    Q, _ = _embed_batch(model, q_ids)
    T, _ = _embed_batch(model, t_ids)
    logits, _ = _batch_logits(model, Q, T)
    return float(np.mean(bce_with_logits(logits, labels.astype(logits.dtype))))


def _tower_backward(weights, biases, acts, pre, d_out):
    grads = []
    d = d_out
    for w, b, a, z in zip(reversed(weights), reversed(biases),
                          reversed(acts[:-1]), reversed(pre)):
        dz = d * (z > 0)
        grads.append((a.T @ dz, dz.sum(axis=0)))
        d = dz @ w.T
    grads.reverse()
    return grads, d


def batch_gradients(model: StudentModel, batch):
    """Exact gradients of the batch-mean loss.

    Returns (mean_loss, dense_grads: {block: array},
    (unique_row_ids, row_grads)) — embedding gradients only for the rows the
    batch touches; untouched rows have exactly zero gradient.
    """
    if not len(batch):
        raise ValueError("batch must be nonempty")
    q_ids, t_ids, labels = _unpack_batch(batch)
    dtype = model.config.np_dtype
    Q, q_inv = _embed_batch(model, q_ids)
    T, t_inv = _embed_batch(model, t_ids)
    logits, caches = _batch_logits(model, Q, T)
    losses = bce_with_logits(logits, labels.astype(logits.dtype))
    if not np.isfinite(losses).all():
        bad = int(np.argmax(~np.isfinite(losses)))
        raise TrainingDivergedError(
            f"non-finite loss at batch index {bad} (logit {logits[bad]!r})",
            block="logit", batch_index=bad)
    mean_loss = float(np.mean(losses))

    batch_n = len(batch)
    d_logit = (sigmoid(logits) - labels) / batch_n  # dtype follows logits
    d_logit = d_logit.astype(dtype, copy=False)

    dense: dict[str, np.ndarray] = {}
    if model.config.topology == TOPOLOGY_FC:
        acts, pre = caches
        w_last = model.weights[-1]
        dense[f"fc_w{len(model.weights) - 1}"] = (acts[-1].T @ d_logit)[:, None]
        dense[f"fc_b{len(model.weights) - 1}"] = np.array([d_logit.sum()], dtype=dtype)
        d = d_logit[:, None] @ w_last[:, 0][None, :]
        grads, d_in = _tower_backward(model.weights[:-1], model.biases[:-1], acts, pre, d)
        for i, (gw, gb) in enumerate(grads):
            dense[f"fc_w{i}"] = gw
            dense[f"fc_b{i}"] = gb
        dim = model.config.embedding_dim
        dQ, dT = d_in[:, :dim], d_in[:, dim:]
    else:
        q_acts, q_pre, t_acts, t_pre = caches
        du = d_logit[:, None] * t_acts[-1]
        dv = d_logit[:, None] * q_acts[-1]
        q_grads, dQ = _tower_backward(model.weights, model.biases, q_acts, q_pre, du)
        t_grads, dT = _tower_backward(model.t_weights, model.t_biases, t_acts, t_pre, dv)
        for i, (gw, gb) in enumerate(q_grads):
            dense[f"q_w{i}"] = gw
            dense[f"q_b{i}"] = gb
        for i, (gw, gb) in enumerate(t_grads):
            dense[f"t_w{i}"] = gw
            dense[f"t_b{i}"] = gb

    # Scatter per-occurrence contributions into per-row gradients. Each
    # occurrence of row r in example i receives d_side[i]/√n_i.
    all_ids = []
    all_contribs = []
    for i in range(batch_n):
        if len(q_ids[i]):
            all_ids.append(q_ids[i])
            all_contribs.append(np.repeat((dQ[i] * q_inv[i])[None, :], len(q_ids[i]), axis=0))
        if len(t_ids[i]):
            all_ids.append(t_ids[i])
            all_contribs.append(np.repeat((dT[i] * t_inv[i])[None, :], len(t_ids[i]), axis=0))
    if all_ids:
        flat_ids = np.concatenate(all_ids)
        flat_contribs = np.concatenate(all_contribs, axis=0)
        unique_ids, inverse = np.unique(flat_ids, return_inverse=True)
        row_grads = np.zeros((len(unique_ids), model.config.embedding_dim), dtype=dtype)
        np.add.at(row_grads, inverse, flat_contribs)
    else:
        unique_ids = np.empty(0, dtype=np.int64)
        row_grads = np.zeros((0, model.config.embedding_dim), dtype=dtype)

    for name, grad in list(dense.items()) + [("embedding", row_grads)]:
        if not np.isfinite(grad).all():
            raise TrainingDivergedError(f"non-finite gradient in block {name!r}", block=name)
    return mean_loss, dense, (unique_ids, row_grads)


@dataclass
class AdagradState:
    """Per-parameter accumulated squared gradients."""

    accumulators: dict[str, np.ndarray]
    epsilon: float = ADAGRAD_EPSILON


def init_adagrad(model: StudentModel, epsilon: float = ADAGRAD_EPSILON) -> AdagradState:
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return AdagradState({name: np.zeros_like(p) for name, p in model.param_blocks()}, epsilon)


def backward_and_step(model: StudentModel, state: AdagradState, batch) -> float:
    """One Adagrad step on the batch-mean gradient:
    acc += g², θ ← θ − lr·g/(√acc + ε). Embedding rows update sparsely.
    Returns the pre-update mean loss."""
    mean_loss, dense, (row_ids, row_grads) = batch_gradients(model, batch)
    lr = model.config.learning_rate
    eps = state.epsilon
    params = dict(model.param_blocks())
    for name, grad in dense.items():
        acc = state.accumulators[name]
        acc += grad * grad
        params[name] -= lr * grad / (np.sqrt(acc) + eps)
    if len(row_ids):
        acc = state.accumulators["embedding"]
        acc[row_ids] += row_grads * row_grads
        model.table.rows[row_ids] -= lr * row_grads / (np.sqrt(acc[row_ids]) + eps)
    return mean_loss


def encode_examples(rows, vocab: Vocab, joiner: str = DEFAULT_JOINER):
    """Tokenize and vocab-encode (query, title, soft_label) rows once, ahead
    of the epoch loop."""
    encoded = []
    for query, title, label in rows:
        q_ids = encode_tokens(tokenize(query, joiner), vocab)
        t_ids = encode_tokens(tokenize(title, joiner), vocab)
        encoded.append((q_ids, t_ids, float(label)))
    return encoded


def train(model: StudentModel, dataset, state: Optional[AdagradState] = None):
    """Run config.epochs of shuffled mini-batches over an encoded dataset.

    Shuffle order derives from config.seed, so a fixed seed reproduces the
    whole trajectory bit for bit. On divergence the model is restored to the
    last completed epoch before the error propagates.

    Returns (model, per-epoch mean losses).
    """
    examples = list(dataset)
    if not examples:
        raise InputError("training dataset is empty")
    config = model.config
    if state is None:
        state = init_adagrad(model)
    rng = np.random.default_rng(config.seed)
    last_good = model.copy()
    epoch_losses: list[float] = []
    for epoch in range(config.epochs):
        order = rng.permutation(len(examples))
        total = 0.0
        for start in range(0, len(examples), config.batch_size):
            batch = [examples[i] for i in order[start:start + config.batch_size]]
            try:
                batch_loss = backward_and_step(model, state, batch)
            except TrainingDivergedError as exc:
                model.load_params_from(last_good)
                raise TrainingDivergedError(
                    f"epoch {epoch}, batch starting at {start}: {exc} "
                    f"(model restored to end of epoch {epoch - 1})",
                    block=exc.block, batch_index=exc.batch_index) from exc
            total += batch_loss * len(batch)
        epoch_losses.append(total / len(examples))
        last_good = model.copy()
    return model, epoch_losses


# ---------------------------------------------------------------------------
# scoring (per-example path, batch-partition invariant)

_PROB_FLOOR = np.nextafter(0.0, 1.0)
_PROB_CEIL = np.nextafter(1.0, 0.0)


def predict_batch(model: StudentModel, pairs) -> np.ndarray:
    """Probabilities for encoded (query_ids, title_ids) pairs.

    Examples are scored one at a time, so any partitioning of a workload
    into batches yields identical values. Outputs are clamped into the open
    interval (0, 1) at float64 resolution.
    """
    probs = np.empty(len(pairs), dtype=np.float64)
    for i, (q_ids, t_ids) in enumerate(pairs):
        q = embed_ids(model.table, np.asarray(q_ids, dtype=np.int64))
        t = embed_ids(model.table, np.asarray(t_ids, dtype=np.int64))
        probs[i] = sigmoid_scalar(forward(model, q, t))
    return np.clip(probs, _PROB_FLOOR, _PROB_CEIL)


def predict_texts(model: StudentModel, vocab: Vocab, pairs,
                  joiner: str = DEFAULT_JOINER) -> np.ndarray:
    encoded = [(encode_tokens(tokenize(q, joiner), vocab),
                encode_tokens(tokenize(t, joiner), vocab)) for q, t in pairs]
    return predict_batch(model, encoded)


# ---------------------------------------------------------------------------
# checkpoints

# Layout (all little-endian):
#   magic   6 bytes  b"B2DNN1"
#   tag     1 byte   b"F" (fully_connected) | b"D" (deep_dot)
#   header  3×uint32 embedding_dim, table_rows, n_hidden
#           n_hidden×uint32 hidden sizes
#   payload float32  table rows (row-major), then per layer W (row-major)
#           and b, fully-connected layers in order ending with the logit
#           layer; deep_dot query tower first, then title tower.


def save_checkpoint(model: StudentModel, path) -> None:
    """float64 models are downcast to the float32 payload; float32 models
    round-trip bit-exactly."""
    config = model.config
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(_TOPOLOGY_TAGS[config.topology])
        fh.write(struct.pack("<III", config.embedding_dim, model.table.rows.shape[0],
                             len(config.hidden_sizes)))
        fh.write(struct.pack(f"<{len(config.hidden_sizes)}I", *config.hidden_sizes))
        fh.write(np.ascontiguousarray(model.table.rows, dtype="<f4").tobytes())
        layer_params = list(zip(model.weights, model.biases))
        if config.topology == TOPOLOGY_DD:
            layer_params += list(zip(model.t_weights, model.t_biases))
        for w, b in layer_params:
            fh.write(np.ascontiguousarray(w, dtype="<f4").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f4").tobytes())


def load_checkpoint(path) -> StudentModel:
    with open(path, "rb") as fh:
        blob = fh.read()
    offset = 0

    def take(n: int, what: str) -> bytes:
        nonlocal offset
        if offset + n > len(blob):
            raise CheckpointTruncatedError(
                f"{path}: file ends inside {what} ({len(blob)} bytes, need {offset + n})")
        piece = blob[offset:offset + n]
        offset += n
        return piece

    magic = take(len(CHECKPOINT_MAGIC), "magic")
    if magic != CHECKPOINT_MAGIC:
        raise CheckpointVersionError(f"{path}: bad magic {magic!r}, expected {CHECKPOINT_MAGIC!r}")
    tag = take(1, "topology tag")
    if tag not in _TAG_TOPOLOGIES:
        raise CheckpointVersionError(f"{path}: unknown topology tag {tag!r}")
    topology = _TAG_TOPOLOGIES[tag]
    dim, rows, n_hidden = struct.unpack("<III", take(12, "shape table"))
    if dim < 1 or n_hidden < 1 or n_hidden > 1024:
        raise CheckpointShapeError(f"{path}: implausible shape table (dim={dim}, hidden={n_hidden})")
    hidden = struct.unpack(f"<{n_hidden}I", take(4 * n_hidden, "hidden sizes"))
    if any(h < 1 for h in hidden):
        raise CheckpointShapeError(f"{path}: non-positive hidden size in {hidden}")

    config = StudentConfig(topology=topology, hidden_sizes=hidden, embedding_dim=dim)

    def take_array(shape: tuple[int, ...], what: str) -> np.ndarray:
        count = int(np.prod(shape))
        raw = take(4 * count, what)
        return np.frombuffer(raw, dtype="<f4").reshape(shape).copy()

    table = EmbeddingTable(take_array((rows, dim), "embedding table"))
    dims = _layer_dims(config)

    def take_layers(side: str) -> tuple[list[np.ndarray], list[np.ndarray]]:
        ws, bs = [], []
        for i, d in enumerate(dims):
            ws.append(take_array(d, f"{side} layer {i} weights"))
            bs.append(take_array((d[1],), f"{side} layer {i} biases"))
        return ws, bs

    weights, biases = take_layers("query" if topology == TOPOLOGY_DD else "dense")
    t_weights = t_biases = None
    if topology == TOPOLOGY_DD:
        t_weights, t_biases = take_layers("title")
    if offset != len(blob):
        raise CheckpointShapeError(
            f"{path}: {len(blob) - offset} trailing bytes beyond declared shapes")
    return StudentModel(config, table, weights, biases, t_weights, t_biases)
