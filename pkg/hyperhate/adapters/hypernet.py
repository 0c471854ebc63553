"""
Auxiliary weight-generating networks for the character backbone.

Both variants share the same generator head:

    o1 = ReLU(W_in . u)                 u in R^U, W_in in R^{(Z*C_in) x U}
    O1 = reshape(o1, [C_in, Z])         row-major
    O2 = ReLU(O1 . W_out)               W_out in R^{Z x (k*C_out)}
    W  = reshape(O2, [C_in, k, C_out])  row-major

The static variant feeds a learned layer embedding z_j (U = Z); the dynamic
variant feeds the Bi-GRU context of the layer's input sequence (U = 2n).
One instance serves both conv layers.

W_in and W_out are drawn so that, for inputs of the expected mean square,
o1 has unit mean square and the generated kernels have the Glorot variance
of an ordinary C_in x k x C_out conv layer.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from hyperhate.autodiff import ops
from hyperhate.autodiff.gru import GRUWeights, bigru_final_states, glorot_uniform
from hyperhate.autodiff.tensor import Var
from hyperhate.errors import DimensionError
from hyperhate.interfaces.base import ConvWeightSource
from hyperhate.models.params import ParamCount

logger = logging.getLogger(__name__)

# Mean square of a Bi-GRU context at initialisation; the forward half is
# close to zero once it has run through trailing padding.
CONTEXT_MEAN_SQUARE = 0.005


def uniform_with_variance(rng: np.random.Generator, variance: float, shape) -> np.ndarray:
    limit = np.sqrt(3.0 * variance)
    return rng.uniform(-limit, limit, size=shape)


@dataclass(frozen=True)
class AuxConfig:
    """Generator sizes. Defaults give 64x7x64 kernels from Z=10."""
    z_dim: int = 10
    c_in: int = 64
    kernel: int = 7
    c_out: int = 64
    layers: int = 2
    gru_hidden: int = 32
    recurrent_dropout: float = 0.1

    def __post_init__(self):
        ops.check_probability(self.recurrent_dropout)

    @property
    def context_dim(self) -> int:
        return 2 * self.gru_hidden

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AuxConfig":
        return cls(**data)


class _GeneratorHead:
    """W_in / W_out pair shared by all conv layers."""

    def __init__(self, config: AuxConfig, input_dim: int, input_mean_square: float,
                 rng: np.random.Generator):
        self.config = config
        rows = config.z_dim * config.c_in
        # ReLU halves the mean square at each stage
        in_variance = 2.0 / (input_dim * input_mean_square)
        conv_variance = 2.0 / (config.c_in * config.kernel + config.c_out)
        out_variance = 2.0 * conv_variance / config.z_dim
        self.w_in = Var(uniform_with_variance(rng, in_variance, (rows, input_dim)),
                        name="aux.w_in")
        self.w_out = Var(uniform_with_variance(rng, out_variance,
                                               (config.z_dim, config.kernel * config.c_out)),
                         name="aux.w_out")

    def generate(self, u: Var) -> Var:
        """u: [U] -> [C_in, k, C_out]; u: [B, U] -> [B, C_in, k, C_out]."""
        cfg = self.config
        batched = u.value.ndim == 2
        rows = u if batched else ops.reshape(u, (1, u.shape[0]))
        o1 = ops.relu(ops.matmul(rows, ops.transpose(self.w_in)))          # [B, Z*C_in]
        o1 = ops.reshape(o1, (rows.shape[0], cfg.c_in, cfg.z_dim))         # [B, C_in, Z]
        o2 = ops.relu(ops.matmul(o1, self.w_out))                          # [B, C_in, k*C_out]
        shape = (cfg.c_in, cfg.kernel, cfg.c_out)
        if batched:
            return ops.reshape(o2, (rows.shape[0],) + shape)
        return ops.reshape(o2, shape)

    def parameters(self) -> Dict[str, Var]:
        return {"aux.w_in": self.w_in, "aux.w_out": self.w_out}


class StaticAuxiliary(ConvWeightSource):
    """
    Static generator: each conv layer j owns a learned embedding z_j and the
    kernels do not depend on the input text.
    """

    source = "generated"

    def __init__(self, config: AuxConfig, rng: np.random.Generator):
        self.config = config
        self.z = [Var(glorot_uniform(rng, config.z_dim, 1).reshape(config.z_dim), name=f"aux.z{j}")
                  for j in range(1, config.layers + 1)]
        # mean square of a Glorot-uniform z_j
        self.head = _GeneratorHead(config, config.z_dim, 2.0 / (config.z_dim + 1), rng)

    def static_generate(self, layer: int) -> Var:
        if not 1 <= layer <= self.config.layers:
            raise ValueError(f"layer must be in 1..{self.config.layers}, got {layer}")
        return self.head.generate(self.z[layer - 1])

    def conv_weight(self, layer, layer_input, mode, rng=None) -> Var:
        return self.static_generate(layer)

    def parameters(self) -> Dict[str, Var]:
        params = {f"aux.z{j}": z for j, z in enumerate(self.z, start=1)}
        params.update(self.head.parameters())
        return params

    def param_rows(self) -> List[ParamCount]:
        return [
            ParamCount("aux.z", sum(z.size for z in self.z)),
            ParamCount("aux.w_in", self.head.w_in.size),
            ParamCount("aux.w_out", self.head.w_out.size),
        ]


class DynamicAuxiliary(ConvWeightSource):
    """
    Dynamic generator: a shared Bi-GRU summarises the sequence entering each
    conv layer into a context vector, from which per-example kernels are
    generated.
    """

    source = "generated"

    def __init__(self, config: AuxConfig, rng: np.random.Generator):
        self.config = config
        self.gru_forward = GRUWeights.create(config.c_in, config.gru_hidden, rng, "aux.gru_fwd")
        self.gru_backward = GRUWeights.create(config.c_in, config.gru_hidden, rng, "aux.gru_bwd")
        self.head = _GeneratorHead(config, config.context_dim, CONTEXT_MEAN_SQUARE, rng)

    def dynamic_context(self, layer_input: Var, mode: str = ops.INFER,
                        rng: Optional[np.random.Generator] = None) -> Var:
        """[L, C_in] -> [2n] or [B, L, C_in] -> [B, 2n]: [backward-final ; forward-final]."""
        width = layer_input.shape[-1]
        if width != self.config.c_in:
            raise DimensionError(
                f"context input has {width} channels, the Bi-GRU expects {self.config.c_in}")
        masks = None
        p = self.config.recurrent_dropout
        if mode == ops.TRAIN and p > 0.0:
            if rng is None:
                raise ValueError("train-mode recurrent dropout needs a random generator")
            batch = layer_input.shape[0] if layer_input.value.ndim == 3 else 1
            state = (batch, self.config.gru_hidden)
            masks = (ops.dropout_mask(state, p, rng), ops.dropout_mask(state, p, rng))
        return bigru_final_states(layer_input, self.gru_forward, self.gru_backward, masks)

    def dynamic_generate(self, layer_input: Var, mode: str = ops.INFER,
                         rng: Optional[np.random.Generator] = None) -> Var:
        return self.head.generate(self.dynamic_context(layer_input, mode, rng))

    def conv_weight(self, layer, layer_input, mode, rng=None) -> Var:
        return self.dynamic_generate(layer_input, mode, rng)

    def parameters(self) -> Dict[str, Var]:
        params = {}
        params.update(self.gru_forward.parameters("aux.gru_fwd"))
        params.update(self.gru_backward.parameters("aux.gru_bwd"))
        params.update(self.head.parameters())
        return params

    def param_rows(self) -> List[ParamCount]:
        return [
            ParamCount("aux.gru", self.gru_forward.count() + self.gru_backward.count()),
            ParamCount("aux.w_in", self.head.w_in.size),
            ParamCount("aux.w_out", self.head.w_out.size),
        ]
