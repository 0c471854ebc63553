"""
Word-level CNN-GRU baseline.

embedding(|V| x 100) -> conv(100 filters, k=4, valid, ReLU) -> maxpool(4)
  -> GRU(100) over time -> global max over states -> FC(1) -> sigmoid

With 30 tokens per input the sequence runs 30 -> 27 -> 6 positions.
The vocabulary is built from the training split in ``prepare``; the
embedding table cannot be allocated before that.
The output layer starts at zero.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np

from hyperhate.adapters.charcnn import Dense
from hyperhate.autodiff import ops
from hyperhate.autodiff.gru import GRUWeights, glorot_uniform, gru_scan
from hyperhate.autodiff.tensor import Var
from hyperhate.errors import DimensionError
from hyperhate.interfaces.base import ClassifierInterface
from hyperhate.models.params import ParamCount, ParamReport
from hyperhate.text.vocab import MAX_TOKENS, WordVocab, build_word_vocab

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CnnGruConfig:
    """Baseline sizes. ``vocab_size`` is only used for accounting before a vocabulary exists."""
    embed_dim: int = 100
    max_tokens: int = MAX_TOKENS
    filters: int = 100
    kernel: int = 4
    pool: int = 4
    gru_hidden: int = 100
    min_count: int = 2
    vocab_size: int = 20000

    def __post_init__(self):
        if self.pooled_length < 1:
            raise DimensionError(
                f"{self.max_tokens} tokens leave no positions after conv k={self.kernel} "
                f"and pool {self.pool}")

    @property
    def pooled_length(self) -> int:
        return (self.max_tokens - self.kernel + 1) // self.pool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CnnGruConfig":
        return cls(**data)


class CnnGruClassifier(ClassifierInterface):
    """
    CNN-GRU baseline classifier over word tokens.
    """

    kind = "cnngru"

    def __init__(self, config: CnnGruConfig, rng: np.random.Generator,
                 vocab: Optional[WordVocab] = None):
        self.settings = config
        self._rng = rng
        self.vocab: Optional[WordVocab] = None
        self.embedding: Optional[Var] = None
        if vocab is not None:
            self._allocate(vocab)

    def _allocate(self, vocab: WordVocab) -> None:
        cfg, rng = self.settings, self._rng
        if vocab.max_length != cfg.max_tokens:
            raise DimensionError(
                f"vocabulary pads to {vocab.max_length} tokens, model expects {cfg.max_tokens}")
        self.vocab = vocab
        self.embedding = Var(glorot_uniform(rng, len(vocab), cfg.embed_dim), name="embedding")
        self.conv_w = Var(
            glorot_uniform(rng, cfg.embed_dim * cfg.kernel, cfg.filters)
            .reshape(cfg.embed_dim, cfg.kernel, cfg.filters), name="conv.w")
        self.conv_b = Var(np.zeros(cfg.filters), name="conv.b")
        self.gru = GRUWeights.create(cfg.filters, cfg.gru_hidden, rng, "gru")
        self.fc = Dense.output(cfg.gru_hidden, "fc")
        logger.info(f"CNN-GRU allocated for a vocabulary of {len(vocab)} entries")

    def _require_vocab(self) -> WordVocab:
        if self.vocab is None:
            raise RuntimeError("CNN-GRU vocabulary is not built; call prepare() on training texts")
        return self.vocab

    def prepare(self, texts: Sequence[str]) -> None:
        if self.vocab is None:
            self._allocate(build_word_vocab(texts, self.settings.min_count, self.settings.max_tokens))

    def parameters(self) -> Dict[str, Var]:
        self._require_vocab()
        params = {"embedding": self.embedding, "conv.w": self.conv_w, "conv.b": self.conv_b}
        params.update(self.gru.parameters("gru"))
        params.update({"fc.w": self.fc.w, "fc.b": self.fc.b})
        return params

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        return self._require_vocab().encode_batch(texts)

    def forward(self, inputs, mode=ops.INFER, rng=None) -> Var:
        vocab = self._require_vocab()
        inputs = np.asarray(inputs)
        if inputs.ndim == 1:
            inputs = inputs[None]
        batch = inputs.shape[0]
        x = ops.embedding(self.embedding, inputs, vocab.pad_index)
        x = ops.relu(ops.add(ops.conv1d(x, self.conv_w, padding="valid"), self.conv_b))
        x = ops.maxpool1d(x, self.settings.pool)
        states = gru_scan(x, self.gru)
        pooled = ops.maxpool1d(states, states.shape[1])
        logits = self.fc(ops.reshape(pooled, (batch, self.settings.gru_hidden)))
        return ops.sigmoid(ops.reshape(logits, (batch,)))

    def param_report(self) -> ParamReport:
        cfg = self.settings
        rows = len(self.vocab) if self.vocab is not None else cfg.vocab_size
        report = ParamReport(model=self.kind)
        report.extend([
            ParamCount("embedding", rows * cfg.embed_dim),
            ParamCount("conv", cfg.embed_dim * cfg.kernel * cfg.filters + cfg.filters),
            ParamCount("gru", 3 * (cfg.gru_hidden * (cfg.filters + cfg.gru_hidden) + cfg.gru_hidden)),
            ParamCount("fc", cfg.gru_hidden + 1),
        ])
        return report

    def config(self) -> Dict[str, Any]:
        return {"cnngru": self.settings.to_dict()}

    def extra_state(self) -> Dict[str, Any]:
        return {"vocab": self._require_vocab().to_dict()}

    def load_extra_state(self, state: Dict[str, Any]) -> None:
        self._allocate(WordVocab.from_dict(state["vocab"]))
