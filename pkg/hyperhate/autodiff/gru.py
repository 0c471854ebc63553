"""
GRU recurrence as a single recorded operation.

Gate layout inside the stacked matrices is [update | reset | candidate]:

    z_t = sigmoid(x_t W_z + h~ U_z + b_z)
    r_t = sigmoid(x_t W_r + h~ U_r + b_r)
    n_t = tanh(x_t W_n + (r_t * h~) U_n + b_n)
    h_t = (1 - z_t) * n_t + z_t * h_{t-1}

where h~ = h_{t-1} * m and m is an optional recurrent-dropout mask held fixed
for the whole sequence (all ones at inference). Backpropagation through time
is written out by hand so a 120-step sequence costs one tape record.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from hyperhate.autodiff import ops
from hyperhate.autodiff.tensor import Var, emit
from hyperhate.errors import DimensionError, EmptySequenceError

logger = logging.getLogger(__name__)


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, shape=None) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape or (fan_in, fan_out))


@dataclass
class GRUWeights:
    """Weights of one GRU direction: input kernel, recurrent kernel, one bias per gate."""
    w_x: Var   # [d, 3n]
    w_h: Var   # [n, 3n]
    b: Var     # [3n]

    @property
    def hidden(self) -> int:
        return self.w_h.shape[0]

    @property
    def input_dim(self) -> int:
        return self.w_x.shape[0]

    @classmethod
    def create(cls, input_dim: int, hidden: int, rng: np.random.Generator,
               prefix: str = "gru") -> "GRUWeights":
        """Glorot-uniform kernels (per gate block) and zero biases."""
        w_x = np.concatenate([glorot_uniform(rng, input_dim, hidden) for _ in range(3)], axis=1)
        w_h = np.concatenate([glorot_uniform(rng, hidden, hidden) for _ in range(3)], axis=1)
        return cls(
            w_x=Var(w_x, name=f"{prefix}.w_x"),
            w_h=Var(w_h, name=f"{prefix}.w_h"),
            b=Var(np.zeros(3 * hidden), name=f"{prefix}.b"),
        )

    def parameters(self, prefix: str) -> Dict[str, Var]:
        return {f"{prefix}.w_x": self.w_x, f"{prefix}.w_h": self.w_h, f"{prefix}.b": self.b}

    def count(self) -> int:
        return self.w_x.size + self.w_h.size + self.b.size


def gru_scan(x: Var, weights: GRUWeights, reverse: bool = False,
             mask: Optional[np.ndarray] = None) -> Var:
    """
    Run a GRU over x: [L, d] or [B, L, d] from h_0 = 0.

    Returns every hidden state, [B, L, n], stored at the position of the
    input step that produced it; with ``reverse=True`` the sequence is read
    from the last position to the first, so the final state sits at index 0.
    ``mask`` ([B, n]) is the recurrent-dropout mask, already scaled.
    """
    squeeze = x.value.ndim == 2
    xv = x.value[None] if squeeze else x.value
    if xv.ndim != 3:
        raise DimensionError(f"GRU input must be [L, d] or [B, L, d], got {x.shape}")
    batch, length, dim = xv.shape
    if length == 0:
        raise EmptySequenceError("GRU received an empty sequence")
    if dim != weights.input_dim:
        raise DimensionError(
            f"GRU input width {dim} does not match kernel {weights.w_x.shape}")
    n = weights.hidden
    wx, wh, b = weights.w_x.value, weights.w_h.value, weights.b.value
    dtype = np.result_type(xv.dtype, wx.dtype)
    m = np.ones((batch, n), dtype=dtype) if mask is None else mask.astype(dtype)
    if m.shape != (batch, n):
        raise DimensionError(f"recurrent mask {m.shape} does not match state ({batch}, {n})")

    xw = np.matmul(xv, wx) + b                            # [B, L, 3n]
    order = range(length - 1, -1, -1) if reverse else range(length)
    states = np.zeros((batch, length, n), dtype=dtype)
    cache = []
    h_prev = np.zeros((batch, n), dtype=dtype)
    for t in order:
        hm = h_prev * m
        hu = hm @ wh[:, :2 * n]
        z = ops._sigmoid(xw[:, t, :n] + hu[:, :n])
        r = ops._sigmoid(xw[:, t, n:2 * n] + hu[:, n:])
        rh = r * hm
        cand = np.tanh(xw[:, t, 2 * n:] + rh @ wh[:, 2 * n:])
        h = (1.0 - z) * cand + z * h_prev
        states[:, t] = h
        cache.append((t, h_prev, hm, z, r, rh, cand))
        h_prev = h
    out = states[0] if squeeze else states

    def backward(g):
        g3 = g[None] if squeeze else g
        gxw = np.zeros_like(xw)
        gwh = np.zeros_like(wh)
        dh_next = np.zeros((batch, n), dtype=dtype)
        for t, hp, hm, z, r, rh, cand in reversed(cache):
            dh = g3[:, t] + dh_next
            dz = dh * (hp - cand)
            dcand = dh * (1.0 - z)
            dh_prev = dh * z
            dn_pre = dcand * (1.0 - cand * cand)
            gwh[:, 2 * n:] += rh.T @ dn_pre
            drh = dn_pre @ wh[:, 2 * n:].T
            dr = drh * hm
            dhm = drh * r
            dz_pre = dz * z * (1.0 - z)
            dr_pre = dr * r * (1.0 - r)
            dzr = np.concatenate([dz_pre, dr_pre], axis=1)
            gwh[:, :2 * n] += hm.T @ dzr
            dhm = dhm + dzr @ wh[:, :2 * n].T
            dh_next = dh_prev + dhm * m
            gxw[:, t, :n] = dz_pre
            gxw[:, t, n:2 * n] = dr_pre
            gxw[:, t, 2 * n:] = dn_pre
        gx = np.matmul(gxw, wx.T)
        gwx = np.tensordot(xv, gxw, axes=([0, 1], [0, 1]))
        gb = gxw.sum(axis=(0, 1))
        return (gx[0] if squeeze else gx), gwx, gwh, gb

    return emit("gru_scan", (x, weights.w_x, weights.w_h, weights.b), out, backward)


def bigru_final_states(x: Var, forward: GRUWeights, backward: GRUWeights,
                       masks: Optional[tuple] = None) -> Var:
    """
    Bidirectional GRU summary of x: [L, d] or [B, L, d].

    Returns [backward-final ; forward-final], width 2n. ``masks`` is an
    optional (forward_mask, backward_mask) pair of recurrent-dropout masks.
    """
    fmask, bmask = masks if masks is not None else (None, None)
    fwd = gru_scan(x, forward, reverse=False, mask=fmask)
    bwd = gru_scan(x, backward, reverse=True, mask=bmask)
    if x.value.ndim == 2:
        return ops.concat([ops.take(bwd, 0), ops.take(fwd, -1)], axis=-1)
    return ops.concat([ops.take(bwd, (slice(None), 0)), ops.take(fwd, (slice(None), -1))], axis=-1)
