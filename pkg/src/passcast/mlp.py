"""A small feed-forward network: tanh hidden layers, 11-way softmax output.

Written directly against numpy so every step (initialisation, forward,
backprop, SGD) is explicit and reproducible from a seed.
"""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import IO, Sequence, Union

import numpy as np

N_CLASSES = 11
PROB_FLOOR = 1e-12
MAGIC = "PASSCAST-MODEL"
FORMAT_VERSION = 1


class InvalidArchitecture(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class EmptyDataset(ValueError):
    pass


class ModelFormatError(ValueError):
    pass


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(eq=False)
class Model:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]  # (out, in) per layer
    biases: list[np.ndarray]
    seed: int | None = None

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    def copy(self) -> "Model":
        return Model(
            self.layer_sizes,
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.seed,
        )

    def __eq__(self, other) -> bool:
        # Parameters only: a loaded model has no memory of its seed.
        if not isinstance(other, Model):
            return NotImplemented
        return (
            tuple(self.layer_sizes) == tuple(other.layer_sizes)
            and all(np.array_equal(a, b) for a, b in zip(self.weights, other.weights))
            and all(np.array_equal(a, b) for a, b in zip(self.biases, other.biases))
        )


def init_model(layer_sizes: Sequence[int], seed: int = 0) -> Model:
    """Glorot-uniform weights from a seeded PCG64 stream; zero biases."""
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2 or any(s <= 0 for s in sizes):
        raise InvalidArchitecture(f"invalid layer sizes {list(layer_sizes)}")
    rng = make_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Model(sizes, weights, biases, seed)


def _check_input(m: Model, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != m.n_inputs or x.ndim not in (1, 2):
        raise DimensionMismatch(f"model expects {m.n_inputs} inputs, got shape {x.shape}")
    return x


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _activations(m: Model, X: np.ndarray) -> list[np.ndarray]:
    # X is (n, in); returns [X, h1, ..., logits]
    acts = [X]
    h = X
    last = len(m.weights) - 1
    for i, (W, b) in enumerate(zip(m.weights, m.biases)):
        z = h @ W.T + b
        h = z if i == last else np.tanh(z)
        acts.append(h)
    return acts


def logits(m: Model, x) -> np.ndarray:
    x = _check_input(m, x)
    out = _activations(m, np.atleast_2d(x))[-1]
    return out[0] if x.ndim == 1 else out


def forward(m: Model, x) -> np.ndarray:
    """Class probabilities for one feature vector (or a batch of rows)."""
    return softmax(logits(m, x))


def loss(probs, label_onehot) -> float:
    """Cross-entropy of a probability vector against a one-hot target."""
    k = int(np.argmax(label_onehot))
    return -math.log(max(float(probs[k]), PROB_FLOOR))


def mean_loss(P: np.ndarray, y_idx: np.ndarray) -> float:
    if len(y_idx) == 0:
        return float("nan")
    picked = np.maximum(P[np.arange(len(y_idx)), y_idx], PROB_FLOOR)
    return float(-np.log(picked).mean())


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]


def _backprop(m: Model, X: np.ndarray, Y: np.ndarray) -> Gradients:
    # mean gradient over the rows of X; Y is one-hot (n, 11)
    acts = _activations(m, X)
    delta = (softmax(acts[-1]) - Y) / len(X)
    gw = [None] * len(m.weights)
    gb = [None] * len(m.weights)
    for i in range(len(m.weights) - 1, -1, -1):
        gw[i] = delta.T @ acts[i]
        gb[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ m.weights[i]) * (1.0 - acts[i] ** 2)
    return Gradients(gw, gb)


def backward(m: Model, x, label_onehot) -> Gradients:
    """Exact gradient of ``loss(forward(m, x), label)`` for every parameter."""
    x = _check_input(m, x)
    Y = np.atleast_2d(np.asarray(label_onehot, dtype=float))
    if Y.shape[-1] != m.layer_sizes[-1]:
        raise DimensionMismatch(f"label has {Y.shape[-1]} classes, model has {m.layer_sizes[-1]}")
    return _backprop(m, np.atleast_2d(x), Y)


def topk_indices(P: np.ndarray, k: int) -> np.ndarray:
    # stable sort on -p: equal probabilities keep the lower index first
    return np.argsort(-P, axis=-1, kind="stable")[..., :k]


def predict_topk(m: Model, x, k: int = 2) -> list[tuple[int, float]]:
    """The ``k`` most likely receivers as (unum, probability), best first."""
    if not 1 <= k <= m.layer_sizes[-1]:
        raise ValueError(f"k must be in 1..{m.layer_sizes[-1]}")
    p = forward(m, x)
    if p.ndim != 1:
        raise DimensionMismatch("predict_topk takes a single feature vector")
    return [(int(i) + 1, float(p[i])) for i in topk_indices(p, k)]


def topk_accuracy(P: np.ndarray, y_idx: np.ndarray, k: int) -> float:
    if len(y_idx) == 0:
        return float("nan")
    top = topk_indices(P, k)
    return float((top == y_idx[:, None]).any(axis=1).mean())


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    batch_size: int = 32
    epochs: int = 50
    seed: int = 0
    validation_fraction: float = 0.2

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in [0, 1)")


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float
    val_top1: float
    val_top2: float


@dataclass
class TrainHistory:
    epochs: list[EpochStats] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.epochs)

    def __getitem__(self, i) -> EpochStats:
        return self.epochs[i]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epoch", "train_loss", "val_loss", "val_top1", "val_top2"])
        for e in self.epochs:
            w.writerow([e.epoch, repr(e.train_loss), repr(e.val_loss), repr(e.val_top1), repr(e.val_top2)])
        return buf.getvalue()


def split_indices(n: int, validation_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded shuffle split into (train, validation) index arrays."""
    perm = make_rng(np.random.SeedSequence([seed, 1]).generate_state(1)[0]).permutation(n)
    n_val = int(round(n * validation_fraction))
    n_val = min(n_val, n - 1) if n > 1 else 0
    return np.sort(perm[n_val:]), np.sort(perm[:n_val])


def _as_labels(y, n_classes: int) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim == 2:
        return y.argmax(axis=1)
    y = y.astype(int)
    if y.size and (y.min() < 1 or y.max() > n_classes):
        raise ValueError(f"labels must be uniform numbers 1..{n_classes}")
    return y - 1


def train(X, y, layer_sizes: Sequence[int], cfg: TrainConfig = TrainConfig()) -> tuple[Model, TrainHistory]:
    """Mini-batch SGD on cross-entropy; fully determined by ``cfg.seed``.

    ``y`` holds receiver unums 1..11 (or one-hot rows). Returns the model
    after the last epoch together with per-epoch statistics.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or len(X) == 0:
        raise EmptyDataset("training needs at least one sample")
    sizes = tuple(int(s) for s in layer_sizes)
    if X.shape[1] != sizes[0]:
        raise DimensionMismatch(f"dataset has {X.shape[1]} features, network expects {sizes[0]}")
    n_classes = sizes[-1]
    y_idx = _as_labels(y, n_classes)
    if len(y_idx) != len(X):
        raise DimensionMismatch("feature and label counts differ")

    model = init_model(sizes, cfg.seed)
    tr, va = split_indices(len(X), cfg.validation_fraction, cfg.seed)
    Y = np.eye(n_classes)[y_idx]
    shuffle_rng = make_rng(np.random.SeedSequence([cfg.seed, 2]).generate_state(1)[0])

    history = TrainHistory()
    for epoch in range(1, cfg.epochs + 1):
        order = tr[shuffle_rng.permutation(len(tr))]
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            g = _backprop(model, X[batch], Y[batch])
            for i in range(len(model.weights)):
                model.weights[i] -= cfg.learning_rate * g.weights[i]
                model.biases[i] -= cfg.learning_rate * g.biases[i]
        history.epochs.append(_epoch_stats(epoch, model, X, y_idx, tr, va))
    return model, history


def _epoch_stats(epoch, model, X, y_idx, tr, va) -> EpochStats:
    P_tr = forward(model, X[tr])
    if len(va):
        P_va = forward(model, X[va])
        return EpochStats(
            epoch,
            mean_loss(P_tr, y_idx[tr]),
            mean_loss(P_va, y_idx[va]),
            topk_accuracy(P_va, y_idx[va], 1),
            topk_accuracy(P_va, y_idx[va], 2),
        )
    nan = float("nan")
    return EpochStats(epoch, mean_loss(P_tr, y_idx[tr]), nan, nan, nan)


PathOrFile = Union[str, os.PathLike, IO[str]]


def dumps(m: Model) -> str:
    lines = [f"{MAGIC} v{FORMAT_VERSION}", "layers: " + " ".join(str(s) for s in m.layer_sizes)]
    for i, (W, b) in enumerate(zip(m.weights, m.biases)):
        lines.append(f"W {i}")
        lines.extend(" ".join(repr(float(v)) for v in row) for row in W)
        lines.append(f"b {i}")
        lines.append(" ".join(repr(float(v)) for v in b))
    return "\n".join(lines) + "\n"


def loads(text: str) -> Model:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    it = iter(enumerate(lines, start=1))

    def take(what):
        try:
            return next(it)
        except StopIteration:
            raise ModelFormatError(f"file truncated: expected {what}") from None

    _, header = take("header")
    parts = header.split()
    if len(parts) != 2 or parts[0] != MAGIC:
        raise ModelFormatError(f"not a model file (header {header!r})")
    if parts[1] != f"v{FORMAT_VERSION}":
        raise ModelFormatError(f"unsupported model format version {parts[1]!r}")
    _, layer_line = take("layers line")
    if not layer_line.startswith("layers:"):
        raise ModelFormatError("missing 'layers:' line")
    try:
        sizes = tuple(int(t) for t in layer_line[len("layers:"):].split())
    except ValueError:
        raise ModelFormatError(f"bad layers line {layer_line!r}") from None
    if len(sizes) < 2 or any(s <= 0 for s in sizes):
        raise ModelFormatError(f"invalid layer sizes {sizes}")

    def row(expected_len, what):
        no, ln = take(what)
        try:
            vals = [float(t) for t in ln.split()]
        except ValueError:
            raise ModelFormatError(f"line {no}: non-numeric value in {what}") from None
        if len(vals) != expected_len:
            raise ModelFormatError(f"line {no}: {what} has {len(vals)} values, expected {expected_len}")
        return vals

    weights, biases = [], []
    for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        no, tag = take(f"'W {i}'")
        if tag != f"W {i}":
            raise ModelFormatError(f"line {no}: expected 'W {i}', got {tag!r}")
        weights.append(np.array([row(fan_in, f"W {i} row") for _ in range(fan_out)]))
        no, tag = take(f"'b {i}'")
        if tag != f"b {i}":
            raise ModelFormatError(f"line {no}: expected 'b {i}', got {tag!r}")
        biases.append(np.array(row(fan_out, f"b {i}")))
    extra = next(it, None)
    if extra is not None:
        raise ModelFormatError(f"line {extra[0]}: unexpected trailing data")
    model = Model(sizes, weights, biases)
    if not all(np.all(np.isfinite(a)) for a in weights + biases):
        raise ModelFormatError("non-finite parameter")
    return model


def save(m: Model, dest: PathOrFile) -> None:
    text = dumps(m)
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", encoding="ascii") as fh:
            fh.write(text)


def load(src: PathOrFile) -> Model:
    if hasattr(src, "read"):
        return loads(src.read())
    with open(src, encoding="ascii", errors="replace") as fh:
        return loads(fh.read())
