"""
Character-level CNN backbone and the classifier that wraps it.

embedding(70x50) -> zero-pad to 64 channels
  -> [conv(k=7, same, ReLU) -> maxpool(4)] x 2      120 -> 30 -> 7 positions
  -> flatten(448) -> FC(128, ReLU) -> dropout(0.5)
  -> FC(32, ReLU) -> dropout(0.5) -> FC(1) -> sigmoid

Conv layers have no bias and take their kernels from a ConvWeightSource:
owned parameters for the plain CharCNN, or an auxiliary network for the
HyperHate variants.

The one-unit output layer starts at zero, so an untrained model gives 0.5.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from hyperhate.autodiff import ops
from hyperhate.autodiff.gru import glorot_uniform
from hyperhate.autodiff.tensor import Var
from hyperhate.errors import DimensionError
from hyperhate.interfaces.base import ClassifierInterface, ConvWeightSource
from hyperhate.models.params import ParamCount, ParamReport
from hyperhate.text.alphabet import Alphabet, build_alphabet, encode_batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BackboneConfig:
    """Shape settings of the character backbone."""
    vocab_rows: int = 70
    embed_dim: int = 50
    seq_len: int = 120
    kernel: int = 7
    channels: int = 64
    pool: int = 4
    fc_sizes: Tuple[int, ...] = (128, 32, 1)
    fc_dropout: float = 0.5
    pad_index: int = 70

    def __post_init__(self):
        if self.embed_dim > self.channels:
            raise DimensionError(
                f"embedding width {self.embed_dim} exceeds conv channels {self.channels}")
        if self.kernel % 2 == 0:
            raise DimensionError(f"backbone kernel width must be odd, got {self.kernel}")
        if self.fc_sizes[-1] != 1:
            raise DimensionError(f"last FC layer must have one unit, got {self.fc_sizes}")
        if self.flatten_dim <= 0:
            raise DimensionError(
                f"sequence length {self.seq_len} vanishes after two pools of {self.pool}")
        ops.check_probability(self.fc_dropout)

    @property
    def pooled_lengths(self) -> Tuple[int, int]:
        first = self.seq_len // self.pool
        return first, first // self.pool

    @property
    def flatten_dim(self) -> int:
        return self.pooled_lengths[1] * self.channels

    @property
    def conv_shape(self) -> Tuple[int, int, int]:
        return (self.channels, self.kernel, self.channels)

    @property
    def conv_size(self) -> int:
        c_in, k, c_out = self.conv_shape
        return c_in * k * c_out

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["fc_sizes"] = list(self.fc_sizes)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BackboneConfig":
        data = dict(data)
        if "fc_sizes" in data:
            data["fc_sizes"] = tuple(data["fc_sizes"])
        return cls(**data)


@dataclass
class Dense:
    """Fully connected layer: weight [in, out] and bias [out]."""
    w: Var
    b: Var

    @classmethod
    def create(cls, fan_in: int, fan_out: int, rng: np.random.Generator, name: str) -> "Dense":
        return cls(w=Var(glorot_uniform(rng, fan_in, fan_out), name=f"{name}.w"),
                   b=Var(np.zeros(fan_out), name=f"{name}.b"))

    @classmethod
    def output(cls, fan_in: int, name: str) -> "Dense":
        """One-unit logit layer starting at zero: every input starts at p = 0.5."""
        return cls(w=Var(np.zeros((fan_in, 1)), name=f"{name}.w"),
                   b=Var(np.zeros(1), name=f"{name}.b"))

    def __call__(self, x: Var) -> Var:
        return ops.add(ops.matmul(x, self.w), self.b)

    @property
    def count(self) -> int:
        return self.w.size + self.b.size


class CharBackbone:
    """
    Main network: embedding table and FC stack; conv kernels come from outside.
    """

    def __init__(self, config: BackboneConfig, rng: np.random.Generator):
        self.config = config
        self.embedding = Var(glorot_uniform(rng, config.vocab_rows, config.embed_dim),
                             name="embedding")
        sizes = (config.flatten_dim,) + tuple(config.fc_sizes)
        last = len(config.fc_sizes) - 1
        self.fc = [Dense.create(sizes[i], sizes[i + 1], rng, f"fc{i + 1}")
                   for i in range(last)]
        self.fc.append(Dense.output(sizes[last], f"fc{last + 1}"))

    def parameters(self) -> Dict[str, Var]:
        params = {"embedding": self.embedding}
        for i, layer in enumerate(self.fc, start=1):
            params[f"fc{i}.w"] = layer.w
            params[f"fc{i}.b"] = layer.b
        return params

    def embed_and_pad(self, inputs: np.ndarray) -> Var:
        """Indices [B, L] -> [B, L, channels]; pad positions and extra channels are zero."""
        x = ops.embedding(self.embedding, inputs, self.config.pad_index)
        return ops.pad_channels(x, self.config.channels)

    def forward(self, inputs: np.ndarray, weights: ConvWeightSource, mode: str = ops.INFER,
                rng: Optional[np.random.Generator] = None) -> Var:
        """Hate probabilities [B] for encoded inputs [B, L]."""
        inputs = np.asarray(inputs)
        if inputs.ndim == 1:
            inputs = inputs[None]
        if inputs.shape[1] != self.config.seq_len:
            raise DimensionError(
                f"encoded length {inputs.shape[1]} differs from configured {self.config.seq_len}")
        batch = inputs.shape[0]
        x = self.embed_and_pad(inputs)
        for layer in (1, 2):
            w = weights.conv_weight(layer, x, mode, rng)
            if w.shape[-3:] != self.config.conv_shape:
                raise DimensionError(
                    f"conv{layer} weights {w.shape} do not match {self.config.conv_shape}")
            x = ops.maxpool1d(ops.relu(ops.conv1d_same(x, w)), self.config.pool)
        h = ops.reshape(x, (batch, self.config.flatten_dim))
        for layer in self.fc[:-1]:
            h = ops.dropout(ops.relu(layer(h)), self.config.fc_dropout, mode, rng)
        logits = self.fc[-1](h)
        return ops.sigmoid(ops.reshape(logits, (batch,)))

    def param_rows(self, conv_generated: bool) -> List[ParamCount]:
        rows = [ParamCount("embedding", self.embedding.size)]
        for layer in (1, 2):
            rows.append(ParamCount(f"conv{layer}", self.config.conv_size, generated=conv_generated))
        for i, dense in enumerate(self.fc, start=1):
            rows.append(ParamCount(f"fc{i}", dense.count))
        return rows


class OwnedConvWeights(ConvWeightSource):
    """Plain CharCNN: both kernel stacks are ordinary parameters."""

    source = "owned"

    def __init__(self, config: BackboneConfig, rng: np.random.Generator):
        c_in, k, c_out = config.conv_shape
        self.kernels = [
            Var(glorot_uniform(rng, c_in * k, c_out).reshape(config.conv_shape), name=f"conv{j}")
            for j in (1, 2)
        ]

    def conv_weight(self, layer, layer_input, mode, rng=None) -> Var:
        return self.kernels[layer - 1]

    def parameters(self) -> Dict[str, Var]:
        return {"conv1": self.kernels[0], "conv2": self.kernels[1]}

    def param_rows(self) -> List[ParamCount]:
        return []


class CharClassifier(ClassifierInterface):
    """
    Character-level classifier: backbone plus a conv weight source.

    ``kind`` is "plain" for owned kernels, "static" or "dynamic" for the
    auxiliary-generated variants.
    """

    def __init__(self, kind: str, backbone: CharBackbone, weights: ConvWeightSource,
                 alphabet: Optional[Alphabet] = None):
        self.kind = kind
        self.backbone = backbone
        self.weights = weights
        self.alphabet = alphabet or build_alphabet()
        if self.alphabet.embedding_rows != backbone.config.vocab_rows:
            raise DimensionError(
                f"alphabet needs {self.alphabet.embedding_rows} embedding rows, "
                f"backbone has {backbone.config.vocab_rows}")

    def parameters(self) -> Dict[str, Var]:
        params = dict(self.backbone.parameters())
        params.update(self.weights.parameters())
        return params

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        return encode_batch(texts, self.alphabet, self.backbone.config.seq_len)

    def forward(self, inputs, mode=ops.INFER, rng=None) -> Var:
        return self.backbone.forward(inputs, self.weights, mode, rng)

    def param_report(self) -> ParamReport:
        report = ParamReport(model=self.kind)
        report.extend(self.backbone.param_rows(conv_generated=self.weights.source != "owned"))
        report.extend(self.weights.param_rows())
        return report

    def config(self) -> Dict[str, Any]:
        data = {"backbone": self.backbone.config.to_dict()}
        aux = getattr(self.weights, "config", None)
        if aux is not None:
            data["aux"] = aux.to_dict()
        return data


def zero_parameters(model: ClassifierInterface) -> None:
    """Set every learnable tensor of ``model`` to zero."""
    for param in model.parameters().values():
        param.value = np.zeros_like(param.value)
