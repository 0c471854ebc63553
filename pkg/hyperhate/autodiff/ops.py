"""
Differentiable operations over Vars.

Every operation accepts an optional leading batch axis; shapes in the
docstrings are written per example. Each op computes its value with numpy and
registers a closure that maps the output gradient to input gradients.
"""

import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from hyperhate.autodiff.tensor import Var, emit
from hyperhate.errors import (
    CorruptInputError,
    DimensionError,
    EmptyOutputError,
    InvalidLabelError,
    InvalidProbabilityError,
    UnsupportedKernelError,
)

logger = logging.getLogger(__name__)

TRAIN = "train"
INFER = "infer"
MODES = (TRAIN, INFER)

BCE_EPSILON = 1e-7


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` after numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# Linear algebra and structure

def matmul(a: Var, b: Var) -> Var:
    """Matrix product over the last two axes, broadcasting leading axes."""
    if a.value.ndim < 2 or b.value.ndim < 2:
        raise DimensionError(
            f"matmul needs operands of rank >= 2, got {a.shape} and {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise DimensionError(
            f"matmul inner dimensions differ: {a.shape} x {b.shape}")
    av, bv = a.value, b.value
    out = np.matmul(av, bv)

    def backward(g):
        ga = np.matmul(g, np.swapaxes(bv, -1, -2))
        gb = np.matmul(np.swapaxes(av, -1, -2), g)
        return _unbroadcast(ga, av.shape), _unbroadcast(gb, bv.shape)

    return emit("matmul", (a, b), out, backward)


def transpose(x: Var) -> Var:
    """Swap the last two axes."""
    out = np.swapaxes(x.value, -1, -2)
    return emit("transpose", (x,), out, lambda g: (np.swapaxes(g, -1, -2),))


def add(a: Var, b: Var) -> Var:
    """Elementwise sum with numpy broadcasting (used for biases)."""
    try:
        out = a.value + b.value
    except ValueError as e:
        raise DimensionError(f"cannot add shapes {a.shape} and {b.shape}") from e
    sa, sb = a.shape, b.shape
    return emit("add", (a, b), out,
                lambda g: (_unbroadcast(g, sa), _unbroadcast(g, sb)))


def mul(a: Var, b: Var) -> Var:
    """Elementwise product with numpy broadcasting."""
    try:
        out = a.value * b.value
    except ValueError as e:
        raise DimensionError(f"cannot multiply shapes {a.shape} and {b.shape}") from e
    av, bv = a.value, b.value
    return emit("mul", (a, b), out,
                lambda g: (_unbroadcast(g * bv, av.shape), _unbroadcast(g * av, bv.shape)))


def scale(x: Var, factor: float) -> Var:
    return emit("scale", (x,), x.value * factor, lambda g: (g * factor,))


def sum_all(x: Var) -> Var:
    """Sum of every element, as a scalar."""
    shape = x.shape
    out = np.asarray(x.value.sum(), dtype=x.value.dtype)
    return emit("sum", (x,), out, lambda g: (np.broadcast_to(g, shape).copy(),))


def mean(x: Var) -> Var:
    n = max(x.size, 1)
    return scale(sum_all(x), 1.0 / n)


def reshape(x: Var, shape: Sequence[int]) -> Var:
    """Row-major reshape."""
    original = x.shape
    try:
        out = x.value.reshape(shape)
    except ValueError as e:
        raise DimensionError(f"cannot reshape {original} into {tuple(shape)}") from e
    return emit("reshape", (x,), out, lambda g: (g.reshape(original),))


def concat(parts: Sequence[Var], axis: int = -1) -> Var:
    values = [p.value for p in parts]
    try:
        out = np.concatenate(values, axis=axis)
    except ValueError as e:
        shapes = [p.shape for p in parts]
        raise DimensionError(f"cannot concatenate shapes {shapes} on axis {axis}") from e
    sizes = [v.shape[axis] for v in values]
    bounds = np.cumsum(sizes)[:-1]

    def backward(g):
        return tuple(np.split(g, bounds, axis=axis))

    return emit("concat", tuple(parts), out, backward)


def take(x: Var, key) -> Var:
    """Basic-indexing slice ``x[key]``."""
    shape = x.shape
    dtype = x.value.dtype
    out = np.array(x.value[key], dtype=dtype)

    def backward(g):
        grad = np.zeros(shape, dtype=dtype)
        grad[key] += g
        return (grad,)

    return emit("take", (x,), out, backward)


def pad_channels(x: Var, width: int) -> Var:
    """Right-pad the last axis with zeros up to ``width``."""
    channels = x.shape[-1]
    if width < channels:
        raise DimensionError(f"cannot pad {channels} channels down to {width}")
    if width == channels:
        return x
    pad = [(0, 0)] * (x.value.ndim - 1) + [(0, width - channels)]
    out = np.pad(x.value, pad)
    return emit("pad_channels", (x,), out, lambda g: (g[..., :channels],))


def embedding(table: Var, indices: np.ndarray, pad_index: int) -> Var:
    """
    Look up rows of ``table`` for integer ``indices``.

    Positions equal to ``pad_index`` produce a zero vector and never receive
    gradient; any other index outside the table is corrupt input.
    """
    indices = np.asarray(indices)
    rows, dim = table.shape
    valid = indices != pad_index
    picked = indices[valid]
    if picked.size and (picked.min() < 0 or picked.max() >= rows):
        bad = picked[(picked < 0) | (picked >= rows)][0]
        raise CorruptInputError(
            f"index {int(bad)} outside embedding table of {rows} rows (pad={pad_index})")
    out = np.zeros(indices.shape + (dim,), dtype=table.value.dtype)
    out[valid] = table.value[picked]

    def backward(g):
        grad = np.zeros_like(table.value)
        np.add.at(grad, picked, g[valid])
        return (grad,)

    return emit("embedding", (table,), out, backward)


# Convolution and pooling

def conv1d(x: Var, w: Var, padding: str = "same") -> Var:
    """
    1-D cross-correlation, stride 1, no bias.

    x: [L, C_in] or [B, L, C_in]; w: [C_in, k, C_out] shared across the batch,
    or [B, C_in, k, C_out] with one kernel stack per example.
    ``padding="same"`` zero-pads (k-1)/2 positions on each side and requires
    odd k; ``"valid"`` keeps only full windows.
    """
    if padding not in ("same", "valid"):
        raise ValueError(f"padding mode {padding!r} is not supported")
    if w.value.ndim not in (3, 4):
        raise DimensionError(f"conv weights must be [C_in, k, C_out] or batched, got {w.shape}")
    per_example = w.value.ndim == 4
    c_in, k, c_out = w.shape[-3:]
    if padding == "same" and k % 2 == 0:
        raise UnsupportedKernelError(f"'same' convolution needs an odd kernel width, got {k}")

    squeeze = x.value.ndim == 2
    xv = x.value[None] if squeeze else x.value
    if xv.ndim != 3:
        raise DimensionError(f"conv input must be [L, C] or [B, L, C], got {x.shape}")
    batch, length, channels = xv.shape
    if channels != c_in:
        raise DimensionError(
            f"conv input has {channels} channels but weights {w.shape} expect {c_in}")
    if per_example and (squeeze or w.shape[0] != batch):
        raise DimensionError(
            f"per-example conv weights {w.shape} do not match input batch {x.shape}")

    pad = (k - 1) // 2 if padding == "same" else 0
    xp = np.pad(xv, ((0, 0), (pad, pad), (0, 0))) if pad else xv
    out_len = xp.shape[1] - k + 1
    if out_len < 1:
        raise EmptyOutputError(f"input length {length} is shorter than kernel width {k}")

    windows = sliding_window_view(xp, k, axis=1)          # [B, L_out, C_in, k]
    cols = windows.reshape(batch, out_len, c_in * k)
    wmat = w.value.reshape(w.shape[:-3] + (c_in * k, c_out))
    out = np.matmul(cols, wmat)
    if squeeze:
        out = out[0]

    def backward(g):
        g3 = g[None] if squeeze else g
        if per_example:
            gw = np.matmul(np.swapaxes(cols, -1, -2), g3).reshape(w.shape)
        else:
            gw = np.tensordot(cols, g3, axes=([0, 1], [0, 1])).reshape(w.shape)
        gcols = np.matmul(g3, np.swapaxes(wmat, -1, -2)).reshape(batch, out_len, c_in, k)
        gxp = np.zeros_like(xp)
        for offset in range(k):
            gxp[:, offset:offset + out_len, :] += gcols[:, :, :, offset]
        gx = gxp[:, pad:pad + length, :]
        return (gx[0] if squeeze else gx), gw

    return emit("conv1d", (x, w), out, backward)


def conv1d_same(x: Var, w: Var) -> Var:
    """Zero-padded convolution whose output length equals the input length."""
    return conv1d(x, w, padding="same")


def maxpool1d(x: Var, pool: int) -> Var:
    """
    Non-overlapping max pooling along the length axis.

    Trailing positions that do not fill a window are dropped. The gradient
    goes to the first maximal position of each window.
    """
    if pool < 1:
        raise ValueError(f"pool size must be >= 1, got {pool}")
    squeeze = x.value.ndim == 2
    xv = x.value[None] if squeeze else x.value
    batch, length, channels = xv.shape
    windows = length // pool
    if windows == 0:
        raise EmptyOutputError(f"sequence length {length} is shorter than pool size {pool}")
    blocks = xv[:, :windows * pool].reshape(batch, windows, pool, channels)
    arg = blocks.argmax(axis=2)
    out = np.take_along_axis(blocks, arg[:, :, None, :], axis=2)[:, :, 0, :]
    if squeeze:
        out = out[0]

    def backward(g):
        g3 = g[None] if squeeze else g
        hit = np.arange(pool)[None, None, :, None] == arg[:, :, None, :]
        grad = np.zeros_like(xv)
        grad[:, :windows * pool] = (hit * g3[:, :, None, :]).reshape(batch, windows * pool, channels)
        return (grad[0] if squeeze else grad,)

    return emit("maxpool1d", (x,), out, backward)


# Pointwise nonlinearities

def _sigmoid(v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    pos = v >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    e = np.exp(v[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def relu(x: Var) -> Var:
    mask = x.value > 0
    return emit("relu", (x,), np.where(mask, x.value, 0.0).astype(x.value.dtype),
                lambda g: (g * mask,))


def sigmoid(x: Var) -> Var:
    s = _sigmoid(x.value)
    return emit("sigmoid", (x,), s, lambda g: (g * s * (1.0 - s),))


def tanh(x: Var) -> Var:
    t = np.tanh(x.value)
    return emit("tanh", (x,), t, lambda g: (g * (1.0 - t * t),))


_POINTWISE = {"relu": relu, "sigmoid": sigmoid, "tanh": tanh}


def pointwise(x: Var, kind: str) -> Var:
    """Apply one of ``relu``, ``sigmoid`` or ``tanh`` elementwise."""
    try:
        fn = _POINTWISE[kind]
    except KeyError:
        raise ValueError(f"unknown pointwise kind {kind!r}; expected one of {sorted(_POINTWISE)}")
    return fn(x)


# Regularisation

def check_probability(p: float) -> None:
    if not 0.0 <= p < 1.0:
        raise InvalidProbabilityError(f"dropout probability must be in [0, 1), got {p}")


def dropout_mask(shape: Tuple[int, ...], p: float, rng: np.random.Generator,
                 dtype=np.float64) -> np.ndarray:
    """Inverted-dropout mask: 0 with probability p, 1/(1-p) otherwise."""
    check_probability(p)
    keep = rng.random(shape) >= p
    return keep.astype(dtype) / (1.0 - p)


def dropout(x: Var, p: float, mode: str, rng: Optional[np.random.Generator] = None) -> Var:
    """Inverted dropout in train mode, identity in infer mode."""
    check_probability(p)
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == INFER or p == 0.0:
        return x
    if rng is None:
        raise ValueError("train-mode dropout needs a random generator")
    mask = dropout_mask(x.shape, p, rng, dtype=x.value.dtype)
    return emit("dropout", (x,), x.value * mask, lambda g: (g * mask,))


# Loss

def bce_loss(p: Var, labels: Union[np.ndarray, Sequence[int]],
             epsilon: float = BCE_EPSILON) -> Var:
    """
    Mean binary cross-entropy of probabilities ``p`` against 0/1 ``labels``.

    Probabilities are clamped to [epsilon, 1 - epsilon]; the gradient is
    evaluated at the clamped value.
    """
    y = np.asarray(labels, dtype=p.value.dtype).reshape(-1)
    bad = ~np.isin(y, (0.0, 1.0))
    if bad.any():
        raise InvalidLabelError(f"labels must be 0 or 1, found {y[bad][0]!r}")
    pv = p.value.reshape(-1)
    if pv.shape != y.shape:
        raise DimensionError(f"{pv.size} probabilities but {y.size} labels")
    n = max(y.size, 1)
    pc = np.clip(pv, epsilon, 1.0 - epsilon)
    losses = -(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc))
    out = np.asarray(losses.mean(), dtype=p.value.dtype)
    shape = p.shape

    def backward(g):
        return ((g * (pc - y) / (pc * (1.0 - pc)) / n).reshape(shape),)

    return emit("bce_loss", (p,), out, backward)
