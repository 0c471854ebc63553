"""
The 69-symbol character alphabet and fixed-length text encoding.

Canonical order (frozen; saved models record its fingerprint):

    a-z                      -> 0..25
    0-9                      -> 26..35
    - , ; . ! ? : ' " / | _ @ # $ % ^ & * ~ ` + = < > ( ) [ ] { } \\   -> 36..67
    space                    -> 68

Index 69 is the unknown character; the pad sentinel (70) lies outside the
70 embedding rows and always embeds to a zero vector.
"""

import hashlib
import string
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, List, Mapping, Tuple

import numpy as np

SEQUENCE_LENGTH = 120

_SYMBOLS = "-,;.!?:'\"/|_@#$%^&*~`+=<>()[]{}\\"
CANONICAL_SYMBOLS: Tuple[str, ...] = tuple(
    string.ascii_lowercase + string.digits + _SYMBOLS + " ")

_ASCII_FOLD = str.maketrans(string.ascii_uppercase, string.ascii_lowercase)


def ascii_lower(text: str) -> str:
    """Fold A-Z to a-z and leave every other character untouched."""
    return text.translate(_ASCII_FOLD)


@dataclass(frozen=True)
class Alphabet:
    """Ordered symbol list with its index map and the unknown / pad indices."""
    symbols: Tuple[str, ...]
    index: Mapping[str, int] = field(repr=False)
    unknown_index: int
    pad_index: int

    @property
    def size(self) -> int:
        return len(self.symbols)

    @property
    def embedding_rows(self) -> int:
        """Symbols plus the unknown row."""
        return self.size + 1

    @property
    def fingerprint(self) -> str:
        """SHA-256 of the symbol ordering; stored in checkpoints."""
        return hashlib.sha256("\x00".join(self.symbols).encode("utf-8")).hexdigest()

    def lookup(self, char: str) -> int:
        return self.index.get(char, self.unknown_index)


def build_alphabet() -> Alphabet:
    """Return the canonical 69-symbol alphabet."""
    symbols = CANONICAL_SYMBOLS
    if len(set(symbols)) != len(symbols) or len(symbols) != 69:
        raise AssertionError("canonical alphabet must hold 69 distinct symbols")
    index = MappingProxyType({s: i for i, s in enumerate(symbols)})
    return Alphabet(symbols=symbols, index=index,
                    unknown_index=len(symbols), pad_index=len(symbols) + 1)


@dataclass(frozen=True)
class EncodedSequence:
    """Exactly ``length`` indices; positions at or after ``valid_length`` are pad."""
    indices: Tuple[int, ...]
    valid_length: int

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)


def encode(text: str, alphabet: Alphabet, length: int = SEQUENCE_LENGTH) -> EncodedSequence:
    """
    Lowercase, map characters to indices (unknown for anything outside the
    alphabet), truncate at ``length`` and right-pad with the pad sentinel.
    """
    folded = ascii_lower(text or "")[:length]
    indices = [alphabet.lookup(ch) for ch in folded]
    valid = len(indices)
    indices.extend([alphabet.pad_index] * (length - valid))
    return EncodedSequence(indices=tuple(indices), valid_length=valid)


def encode_batch(texts: Iterable[str], alphabet: Alphabet,
                 length: int = SEQUENCE_LENGTH) -> np.ndarray:
    """Encode texts into an int64 array of shape [B, length]."""
    rows: List[Tuple[int, ...]] = [encode(t, alphabet, length).indices for t in texts]
    if not rows:
        return np.zeros((0, length), dtype=np.int64)
    return np.asarray(rows, dtype=np.int64)


def decode(sequence: EncodedSequence, alphabet: Alphabet, unknown: str = "�") -> str:
    """Map indices back to characters, dropping padding."""
    out = []
    for i in sequence.indices[:sequence.valid_length]:
        out.append(alphabet.symbols[i] if i < alphabet.size else unknown)
    return "".join(out)
