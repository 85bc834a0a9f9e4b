"""The three neural classifiers: MLP (four ReLU hidden layers), 1-D CNN, and
LSTM, with hand-written forward/backward passes and a shared mini-batch
momentum-SGD training loop.

Conventions shared by all three:

* inputs are count vectors; the CNN and LSTM read them as a 1-D sequence in
  vocabulary-index order (the LSTM in fixed-width frames, see
  :class:`LstmConfig`), the MLP consumes the flat vector;
* dropout is the inverted kind and is active only in training-mode forward
  passes;
* all randomness (weight init, epoch shuffling, dropout masks) comes from one
  :class:`~careerkit.numerics.SeededRng` stream, so a (data, config, seed)
  triple reproduces the run bit-for-bit;
* the loss is categorical cross-entropy on softmax outputs, and every
  backward pass is verified against the central-difference oracle by
  :func:`gradient_check`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import Prediction, as_matrix, _as_row
from .errors import ShapeError, TrainingError
from .numerics import SeededRng, argmax_tiebreak, sigmoid, softmax_rows
from .textprep import CountVector, stratified_split

__all__ = [
    "CnnConfig",
    "LearningCurve",
    "LstmConfig",
    "MlpConfig",
    "MODEL_KINDS",
    "OverfitDiagnostic",
    "TrainingConfig",
    "build_model",
    "forward",
    "gradient_check",
    "kink_margin",
    "overfit_gap",
    "reshape_input",
    "train",
]

MODEL_KINDS = ("mlp", "cnn", "lstm")


def reshape_input(x) -> np.ndarray:
    """Count vector as a 1-D sequence (one channel, vocabulary order)."""
    if isinstance(x, CountVector):
        return x.to_dense()
    return np.asarray(x, dtype=np.float64).reshape(-1)


# ---------------------------------------------------------------------------
# Layers
# ---------------------------------------------------------------------------

def _glorot(rng: SeededRng, fan_in: int, fan_out: int,
            shape: tuple[int, ...]) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.random_array(shape, -limit, limit)


class _Dense:
    def __init__(self, rng: SeededRng, n_in: int, n_out: int, name: str):
        self.name = name
        self.w = _glorot(rng, n_in, n_out, (n_in, n_out))
        self.b = np.zeros(n_out, dtype=np.float64)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)
        self._x: np.ndarray | None = None

    def forward(self, x, training, rng):
        self._x = x
        return x @ self.w + self.b

    def backward(self, grad):
        self.dw += self._x.T @ grad
        self.db += grad.sum(axis=0)
        return grad @ self.w.T

    def params(self):
        return [(f"{self.name}.w", self.w), (f"{self.name}.b", self.b)]

    def grads(self):
        return [self.dw, self.db]


class _Relu:
    def __init__(self):
        self._mask = None

    def forward(self, x, training, rng):
        self._mask = x > 0
        return x * self._mask

    def backward(self, grad):
        return grad * self._mask

    def params(self):
        return []

    def grads(self):
        return []


class _Dropout:
    """Inverted dropout: survivors are scaled by 1/(1-p) during training so
    inference needs no rescaling."""

    def __init__(self, rate: float):
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
        self.rate = rate
        self._mask = None

    def forward(self, x, training, rng):
        if not training or self.rate == 0.0:
            self._mask = None
            return x
        keep = rng.random_array(x.shape) >= self.rate
        self._mask = keep / (1.0 - self.rate)
        return x * self._mask

    def backward(self, grad):
        if self._mask is None:
            return grad
        return grad * self._mask

    def params(self):
        return []

    def grads(self):
        return []


class _Conv1d:
    """Valid 1-D convolution, stride 1, single input channel."""

    def __init__(self, rng: SeededRng, kernel: int, filters: int, name: str):
        self.kernel = kernel
        self.filters = filters
        self.name = name
        self.w = _glorot(rng, kernel, filters, (kernel, filters))
        self.b = np.zeros(filters, dtype=np.float64)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)
        self._windows = None
        self._length = 0

    def forward(self, x, training, rng):
        if x.shape[1] < self.kernel:
            raise ShapeError(f"sequence length {x.shape[1]} shorter than "
                             f"kernel {self.kernel}")
        self._length = x.shape[1]
        self._windows = np.lib.stride_tricks.sliding_window_view(
            x, self.kernel, axis=1)  # (B, L', K)
        return self._windows @ self.w + self.b

    def backward(self, grad):  # grad: (B, L', F)
        self.dw += np.einsum("blk,blf->kf", self._windows, grad)
        self.db += grad.sum(axis=(0, 1))
        dx = np.zeros((grad.shape[0], self._length), dtype=np.float64)
        out_len = grad.shape[1]
        for j in range(self.kernel):
            dx[:, j:j + out_len] += grad @ self.w[j]
        return dx

    def params(self):
        return [(f"{self.name}.w", self.w), (f"{self.name}.b", self.b)]

    def grads(self):
        return [self.dw, self.db]


class _MaxPool1d:
    """Non-overlapping max pooling; a trailing remainder shorter than the
    window is dropped (its gradient is zero by construction)."""

    def __init__(self, window: int):
        self.window = window
        self._argmax = None
        self._in_shape = None

    def forward(self, x, training, rng):  # x: (B, L, F)
        pooled_len = x.shape[1] // self.window
        if pooled_len == 0:
            raise ShapeError(f"sequence length {x.shape[1]} shorter than "
                             f"pool window {self.window}")
        self._in_shape = x.shape
        trimmed = x[:, :pooled_len * self.window, :]
        blocks = trimmed.reshape(x.shape[0], pooled_len, self.window, x.shape[2])
        self._argmax = blocks.argmax(axis=2)
        return blocks.max(axis=2)

    def backward(self, grad):  # grad: (B, P, F)
        batch, pooled_len, filters = grad.shape
        blocks = np.zeros((batch, pooled_len, self.window, filters),
                          dtype=np.float64)
        np.put_along_axis(blocks, self._argmax[:, :, None, :],
                          grad[:, :, None, :], axis=2)
        dx = np.zeros(self._in_shape, dtype=np.float64)
        dx[:, :pooled_len * self.window, :] = blocks.reshape(
            batch, pooled_len * self.window, filters)
        return dx

    def params(self):
        return []

    def grads(self):
        return []


class _Flatten:
    def __init__(self):
        self._shape = None

    def forward(self, x, training, rng):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad):
        return grad.reshape(self._shape)

    def params(self):
        return []

    def grads(self):
        return []


class _Lstm:
    """Single LSTM layer read left to right; emits the final hidden state.

    Gate layout in the fused weight matrices is [input, forget, cell, output].
    The forget-gate bias starts at 1.
    """

    def __init__(self, rng: SeededRng, n_in: int, hidden: int, name: str):
        self.n_in = n_in
        self.hidden = hidden
        self.name = name
        self.wx = _glorot(rng, n_in, hidden, (n_in, 4 * hidden))
        self.wh = _glorot(rng, hidden, hidden, (hidden, 4 * hidden))
        self.b = np.zeros(4 * hidden, dtype=np.float64)
        self.b[hidden:2 * hidden] = 1.0
        self.dwx = np.zeros_like(self.wx)
        self.dwh = np.zeros_like(self.wh)
        self.db = np.zeros_like(self.b)
        self._cache: list[tuple] = []

    def forward(self, x, training, rng):  # x: (B, T, n_in)
        batch = x.shape[0]
        h = np.zeros((batch, self.hidden), dtype=np.float64)
        c = np.zeros((batch, self.hidden), dtype=np.float64)
        self._cache = []
        hid = self.hidden
        for t in range(x.shape[1]):
            x_t = x[:, t, :]
            z = x_t @ self.wx + h @ self.wh + self.b
            gate_i = sigmoid(z[:, :hid])
            gate_f = sigmoid(z[:, hid:2 * hid])
            cand = np.tanh(z[:, 2 * hid:3 * hid])
            gate_o = sigmoid(z[:, 3 * hid:])
            c_prev = c
            c = gate_f * c_prev + gate_i * cand
            h_prev = h
            h = gate_o * np.tanh(c)
            self._cache.append((x_t, h_prev, c_prev, gate_i, gate_f, cand,
                                gate_o, c))
        return h

    def backward(self, grad):  # grad: (B, hidden) at the final step
        hid = self.hidden
        dh = grad
        dc = np.zeros_like(grad)
        dx = np.zeros((grad.shape[0], len(self._cache), self.n_in),
                      dtype=np.float64)
        for t in range(len(self._cache) - 1, -1, -1):
            x_t, h_prev, c_prev, gate_i, gate_f, cand, gate_o, c = self._cache[t]
            tanh_c = np.tanh(c)
            d_o = dh * tanh_c
            dc = dc + dh * gate_o * (1.0 - tanh_c * tanh_c)
            d_i = dc * cand
            d_f = dc * c_prev
            d_cand = dc * gate_i
            dz = np.empty((grad.shape[0], 4 * hid), dtype=np.float64)
            dz[:, :hid] = d_i * gate_i * (1.0 - gate_i)
            dz[:, hid:2 * hid] = d_f * gate_f * (1.0 - gate_f)
            dz[:, 2 * hid:3 * hid] = d_cand * (1.0 - cand * cand)
            dz[:, 3 * hid:] = d_o * gate_o * (1.0 - gate_o)
            self.dwx += x_t.T @ dz
            self.dwh += h_prev.T @ dz
            self.db += dz.sum(axis=0)
            dx[:, t, :] = dz @ self.wx.T
            dh = dz @ self.wh.T
            dc = dc * gate_f
        return dx

    def params(self):
        return [(f"{self.name}.wx", self.wx), (f"{self.name}.wh", self.wh),
                (f"{self.name}.b", self.b)]

    def grads(self):
        return [self.dwx, self.dwh, self.db]


# ---------------------------------------------------------------------------
# Model configs and architectures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MlpConfig:
    hidden: tuple[int, ...] = (256, 128, 64, 32)
    dropout: tuple[float, ...] = (0.3, 0.3, 0.3, 0.3)

    def __post_init__(self):
        if len(self.hidden) != len(self.dropout):
            raise ValueError("need one dropout rate per hidden layer")


@dataclass(frozen=True)
class CnnConfig:
    kernel: int = 3
    filters: int = 16
    pool: int = 2
    dropout: float = 0.5
    dense: int = 64


@dataclass(frozen=True)
class LstmConfig:
    hidden: int = 64
    dropout: float = 0.3
    dense: int = 32
    frame_width: int = 64


@dataclass(frozen=True)
class TrainingConfig:
    epochs: int = 50
    batch_size: int = 8
    learning_rate: float = 0.01
    momentum: float = 0.9
    validation_ratio: float = 0.2
    seed: int = 10

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0.0 < self.validation_ratio < 1.0:
            raise ValueError("validation_ratio must be in (0, 1)")


class _NeuralModel:
    kind = ""

    def __init__(self, n_features: int, n_classes: int, config):
        self.n_features = n_features
        self.n_classes = n_classes
        self.config = config
        self.layers: list = []

    def _pre(self, x: np.ndarray) -> np.ndarray:
        return x

    def forward_batch(self, x, training: bool = False,
                      rng: SeededRng | None = None) -> np.ndarray:
        """Class-probability rows for a dense count-matrix batch."""
        if x.shape[1] != self.n_features:
            raise ShapeError(f"input has {x.shape[1]} features, model expects "
                             f"{self.n_features}")
        out = self._pre(x)
        for layer in self.layers:
            out = layer.forward(out, training, rng)
        return softmax_rows(out)

    def backward_batch(self, dlogits: np.ndarray) -> None:
        grad = dlogits
        for layer in reversed(self.layers):
            grad = layer.backward(grad)

    def param_pairs(self) -> list[tuple[str, np.ndarray]]:
        return [pair for layer in self.layers for pair in layer.params()]

    def grad_list(self) -> list[np.ndarray]:
        return [g for layer in self.layers for g in layer.grads()]

    def zero_grads(self) -> None:
        for g in self.grad_list():
            g[...] = 0.0


class MlpModel(_NeuralModel):
    kind = "mlp"

    def __init__(self, rng: SeededRng, n_features: int, n_classes: int,
                 config: MlpConfig):
        super().__init__(n_features, n_classes, config)
        sizes = (n_features, *config.hidden)
        for i in range(len(config.hidden)):
            self.layers.append(_Dense(rng, sizes[i], sizes[i + 1], f"hidden{i}"))
            self.layers.append(_Relu())
            self.layers.append(_Dropout(config.dropout[i]))
        self.layers.append(_Dense(rng, sizes[-1], n_classes, "out"))


class CnnModel(_NeuralModel):
    kind = "cnn"

    def __init__(self, rng: SeededRng, n_features: int, n_classes: int,
                 config: CnnConfig):
        super().__init__(n_features, n_classes, config)
        conv_len = n_features - config.kernel + 1
        pooled = conv_len // config.pool
        if pooled < 1:
            raise ShapeError(f"{n_features} features is too short for kernel "
                             f"{config.kernel} with pool {config.pool}")
        self.layers = [
            _Conv1d(rng, config.kernel, config.filters, "conv"),
            _Relu(),
            _MaxPool1d(config.pool),
            _Dropout(config.dropout),
            _Flatten(),
            _Dense(rng, pooled * config.filters, config.dense, "dense"),
            _Relu(),
            _Dense(rng, config.dense, n_classes, "out"),
        ]


class LstmModel(_NeuralModel):
    kind = "lstm"

    def __init__(self, rng: SeededRng, n_features: int, n_classes: int,
                 config: LstmConfig):
        super().__init__(n_features, n_classes, config)
        self.steps = -(-n_features // config.frame_width)
        self.layers = [
            _Lstm(rng, config.frame_width, config.hidden, "lstm"),
            _Dropout(config.dropout),
            _Dense(rng, config.hidden, config.dense, "dense"),
            _Relu(),
            _Dense(rng, config.dense, n_classes, "out"),
        ]

    def _pre(self, x: np.ndarray) -> np.ndarray:
        width = self.config.frame_width
        padded = self.steps * width
        if padded != x.shape[1]:
            frames = np.zeros((x.shape[0], padded), dtype=np.float64)
            frames[:, :x.shape[1]] = x
        else:
            frames = x
        return frames.reshape(x.shape[0], self.steps, width)


_CONFIG_TYPES = {"mlp": MlpConfig, "cnn": CnnConfig, "lstm": LstmConfig}
_MODEL_TYPES = {"mlp": MlpModel, "cnn": CnnModel, "lstm": LstmModel}


def build_model(kind: str, n_features: int, n_classes: int,
                model_config=None, rng: SeededRng | None = None):
    if kind not in _MODEL_TYPES:
        raise ValueError(f"unknown model kind {kind!r}; expected one of "
                         f"{MODEL_KINDS}")
    if model_config is None:
        model_config = _CONFIG_TYPES[kind]()
    if rng is None:
        rng = SeededRng(0)
    return _MODEL_TYPES[kind](rng, n_features, n_classes, model_config)


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LearningCurve:
    train_loss: list[float]
    train_acc: list[float]
    val_loss: list[float]
    val_acc: list[float]

    def __len__(self) -> int:
        return len(self.train_loss)

    def csv_lines(self) -> list[str]:
        lines = ["epoch,train_loss,train_acc,val_loss,val_acc"]
        for e in range(len(self)):
            lines.append(f"{e + 1},{self.train_loss[e]!r},{self.train_acc[e]!r},"
                         f"{self.val_loss[e]!r},{self.val_acc[e]!r}")
        return lines

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(self.csv_lines()) + "\n")


def _ce_loss_and_grad(probs: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    n = probs.shape[0]
    loss = float(-np.mean(np.log(probs[np.arange(n), y] + 1e-300)))
    grad = probs.copy()
    grad[np.arange(n), y] -= 1.0
    grad /= n
    return loss, grad


def _loss_and_acc(model: _NeuralModel, x: np.ndarray, y: np.ndarray,
                  ) -> tuple[float, float]:
    probs = model.forward_batch(x)
    loss = float(-np.mean(np.log(probs[np.arange(len(y)), y] + 1e-300)))
    acc = float(np.mean(probs.argmax(axis=1) == y))
    return loss, acc


def train(kind: str, train_x, train_y, config: TrainingConfig | None = None,
          n_classes: int | None = None, model_config=None):
    """Train one neural model; returns (model, LearningCurve).

    A stratified validation set is carved out of the training data first;
    the curve records loss/accuracy on the remaining train part and on the
    validation part after every epoch, with dropout disabled.
    """
    config = config or TrainingConfig()
    x = as_matrix(train_x)
    y = np.asarray(train_y, dtype=np.int64)
    if x.shape[0] != y.shape[0]:
        raise ShapeError(f"{x.shape[0]} rows but {y.shape[0]} labels")
    if np.unique(y).shape[0] < 2:
        raise TrainingError("need at least 2 classes to train")
    if n_classes is None:
        n_classes = int(y.max()) + 1

    rng = SeededRng(config.seed)
    split = stratified_split(y.tolist(), 1.0 - config.validation_ratio,
                             rng.next_uint64())
    fit_idx = np.asarray(split.train_indices, dtype=np.int64)
    val_idx = np.asarray(split.test_indices, dtype=np.int64)
    if val_idx.size == 0:
        raise TrainingError("validation split is empty; lower validation_ratio")
    x_fit, y_fit = x[fit_idx], y[fit_idx]
    x_val, y_val = x[val_idx], y[val_idx]
    if config.batch_size > x_fit.shape[0]:
        raise TrainingError(f"batch_size {config.batch_size} exceeds training "
                            f"size {x_fit.shape[0]}")

    model = build_model(kind, x.shape[1], n_classes, model_config, rng)
    velocity = [np.zeros_like(p) for _, p in model.param_pairs()]
    curve = LearningCurve([], [], [], [])
    n_fit = x_fit.shape[0]
    for epoch in range(config.epochs):
        order = np.asarray(rng.permutation(n_fit), dtype=np.int64)
        for start in range(0, n_fit, config.batch_size):
            batch = order[start:start + config.batch_size]
            model.zero_grads()
            probs = model.forward_batch(x_fit[batch], training=True, rng=rng)
            loss, dlogits = _ce_loss_and_grad(probs, y_fit[batch])
            if not np.isfinite(loss):
                raise TrainingError(f"loss diverged at epoch {epoch + 1}")
            model.backward_batch(dlogits)
            params = [p for _, p in model.param_pairs()]
            grads = model.grad_list()
            for v, p, g in zip(velocity, params, grads):
                v *= config.momentum
                v -= config.learning_rate * g
                p += v
        train_loss, train_acc = _loss_and_acc(model, x_fit, y_fit)
        val_loss, val_acc = _loss_and_acc(model, x_val, y_val)
        if not (np.isfinite(train_loss) and np.isfinite(val_loss)):
            raise TrainingError(f"loss diverged at epoch {epoch + 1}")
        curve.train_loss.append(train_loss)
        curve.train_acc.append(train_acc)
        curve.val_loss.append(val_loss)
        curve.val_acc.append(val_acc)
    return model, curve


def forward(model: _NeuralModel, x) -> Prediction:
    """Inference-mode prediction for one input."""
    dense = _as_row(x, model.n_features)
    distribution = model.forward_batch(dense[None, :])[0]
    return Prediction(argmax_tiebreak(distribution), distribution)


# ---------------------------------------------------------------------------
# Verification and diagnostics
# ---------------------------------------------------------------------------

def gradient_check(kind: str, x, y, eps: float = 1e-5,
                   n_classes: int | None = None, model_config=None,
                   seed: int = 0) -> float:
    """Max relative error between backprop and central differences over every
    parameter tensor (dropout disabled, 64-bit)."""
    from .numerics import finite_difference_gradient

    x = as_matrix(x)
    if x.ndim == 1:
        x = x[None, :]
    y = np.atleast_1d(np.asarray(y, dtype=np.int64))
    if n_classes is None:
        n_classes = int(y.max()) + 1
    model = build_model(kind, x.shape[1], n_classes, model_config,
                        SeededRng(seed))

    def loss_value() -> float:
        probs = model.forward_batch(x)
        return float(-np.mean(np.log(probs[np.arange(len(y)), y] + 1e-300)))

    model.zero_grads()
    probs = model.forward_batch(x)
    _, dlogits = _ce_loss_and_grad(probs, y)
    model.backward_batch(dlogits)
    analytic = [g.copy() for g in model.grad_list()]

    worst = 0.0
    for (name, param), a_grad in zip(model.param_pairs(), analytic):
        original = param.copy()

        def f(values, _param=param):
            _param[...] = values.reshape(_param.shape)
            return loss_value()

        numeric = finite_difference_gradient(f, original.copy().reshape(-1), eps)
        param[...] = original
        numeric = numeric.reshape(param.shape)
        denom = np.maximum(1e-8, np.abs(a_grad) + np.abs(numeric))
        worst = max(worst, float(np.max(np.abs(a_grad - numeric) / denom)))
    return worst


def kink_margin(model: _NeuralModel, x) -> float:
    """Distance from the nearest non-differentiable point (ReLU zero
    crossings, max-pool ties) along an inference forward pass.

    Central differences only measure the true gradient when the perturbation
    cannot cross a kink, so gradient checks should draw inputs until this
    margin comfortably exceeds the perturbation scale.
    """
    x = as_matrix(x)
    if x.ndim == 1:
        x = x[None, :]
    margin = np.inf
    out = model._pre(x)
    for layer in model.layers:
        if isinstance(layer, _Relu):
            margin = min(margin, float(np.min(np.abs(out))))
        elif isinstance(layer, _MaxPool1d):
            pooled_len = out.shape[1] // layer.window
            if layer.window > 1 and pooled_len > 0:
                trimmed = out[:, :pooled_len * layer.window, :]
                blocks = trimmed.reshape(out.shape[0], pooled_len,
                                         layer.window, out.shape[2])
                top2 = np.sort(blocks, axis=2)[:, :, -2:, :]
                margin = min(margin, float(np.min(top2[:, :, 1, :]
                                                  - top2[:, :, 0, :])))
        out = layer.forward(out, False, None)
    return margin


@dataclass(frozen=True)
class OverfitDiagnostic:
    gap: list[float]
    classification: str  # overfitting-trend | underfitting | acceptable


def overfit_gap(curve: LearningCurve, gap_threshold: float = 0.10,
                train_floor: float = 0.60) -> OverfitDiagnostic:
    """Train/validation accuracy gap per epoch plus a coarse classification.

    Underfitting: final train accuracy below the floor. Overfitting trend:
    the mean gap over the final quarter exceeds the threshold while the
    validation loss is rising across that quarter.
    """
    if len(curve) == 0:
        raise ValueError("empty learning curve")
    gap = [t - v for t, v in zip(curve.train_acc, curve.val_acc)]
    if curve.train_acc[-1] < train_floor:
        return OverfitDiagnostic(gap, "underfitting")
    quarter = max(2, -(-len(curve) // 4))
    if len(curve) >= quarter:
        tail_gap = gap[-quarter:]
        rising = curve.val_loss[-1] > curve.val_loss[-quarter]
        if np.mean(tail_gap) > gap_threshold and rising:
            return OverfitDiagnostic(gap, "overfitting-trend")
    return OverfitDiagnostic(gap, "acceptable")
