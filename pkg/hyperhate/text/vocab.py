"""
Word vocabulary for the word-level CNN-GRU baseline.
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List

import numpy as np

from hyperhate.errors import DegenerateDataError
from hyperhate.text.alphabet import ascii_lower

logger = logging.getLogger(__name__)

PAD_TOKEN = "<pad>"
UNKNOWN_TOKEN = "<unk>"
MAX_TOKENS = 30

_TOKEN_RE = re.compile(r"[a-z0-9]+(?:'[a-z]+)?|[^\sa-z0-9]")


def tokenize(text: str) -> List[str]:
    """Lowercase and split into word runs and single punctuation marks."""
    return _TOKEN_RE.findall(ascii_lower(text or ""))


@dataclass
class WordVocab:
    """Token to index map; 0 is padding, 1 is unknown, words follow by frequency."""
    tokens: List[str]
    max_length: int = MAX_TOKENS
    index: Dict[str, int] = field(init=False, repr=False)

    pad_index = 0
    unknown_index = 1

    def __post_init__(self):
        self.index = {token: i for i, token in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index and self.index[token] > self.unknown_index

    def encode(self, text: str) -> np.ndarray:
        ids = [self.index.get(t, self.unknown_index) for t in tokenize(text)][:self.max_length]
        ids.extend([self.pad_index] * (self.max_length - len(ids)))
        return np.asarray(ids, dtype=np.int64)

    def encode_batch(self, texts: Iterable[str]) -> np.ndarray:
        rows = [self.encode(t) for t in texts]
        if not rows:
            return np.zeros((0, self.max_length), dtype=np.int64)
        return np.stack(rows)

    def to_dict(self) -> Dict[str, Any]:
        return {"tokens": list(self.tokens), "max_length": self.max_length}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WordVocab":
        return cls(tokens=list(data["tokens"]), max_length=int(data.get("max_length", MAX_TOKENS)))


def build_word_vocab(texts: Iterable[str], min_count: int = 2,
                     max_length: int = MAX_TOKENS) -> WordVocab:
    """
    Build a vocabulary from training texts only.

    Tokens seen fewer than ``min_count`` times map to unknown.
    """
    texts = list(texts)
    if not texts:
        raise DegenerateDataError("cannot build a word vocabulary from an empty corpus")
    counts = Counter(token for text in texts for token in tokenize(text))
    kept = sorted((t for t, c in counts.items() if c >= min_count), key=lambda t: (-counts[t], t))
    logger.info(f"Word vocabulary: {len(kept)} of {len(counts)} token types kept (min_count={min_count})")
    return WordVocab(tokens=[PAD_TOKEN, UNKNOWN_TOKEN] + kept, max_length=max_length)
