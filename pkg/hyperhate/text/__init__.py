"""
Text package: character alphabet and word vocabulary.
"""

from hyperhate.text.alphabet import (
    Alphabet,
    EncodedSequence,
    SEQUENCE_LENGTH,
    build_alphabet,
    decode,
    encode,
    encode_batch,
)
from hyperhate.text.vocab import WordVocab, build_word_vocab, tokenize
