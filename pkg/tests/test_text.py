"""
Tests for the character alphabet, text encoding and the word vocabulary.
"""

import numpy as np
import pytest

from hyperhate.errors import DegenerateDataError
from hyperhate.text.alphabet import build_alphabet, decode, encode, encode_batch
from hyperhate.text.vocab import build_word_vocab, tokenize


@pytest.fixture
def alphabet():
    return build_alphabet()


class TestAlphabet:

    def test_size_and_rows(self, alphabet):
        assert alphabet.size == 69
        assert alphabet.embedding_rows == 70
        assert alphabet.unknown_index == 69
        assert alphabet.pad_index == 70

    def test_canonical_positions(self, alphabet):
        assert alphabet.lookup("a") == 0
        assert alphabet.lookup("z") == 25
        assert alphabet.lookup("0") == 26
        assert alphabet.lookup("-") == 36
        assert alphabet.lookup("!") == 40
        assert alphabet.lookup("\\") == 67
        assert alphabet.lookup(" ") == 68

    def test_fingerprint_is_stable(self, alphabet):
        assert alphabet.fingerprint == build_alphabet().fingerprint
        assert len(alphabet.fingerprint) == 64


class TestEncode:

    def test_hand_example(self, alphabet):
        seq = encode("Hi!", alphabet)
        assert seq.indices[:3] == (7, 8, 40)
        assert seq.indices[3:] == (70,) * 117
        assert seq.valid_length == 3

    def test_unknown_character(self, alphabet):
        seq = encode("€", alphabet)
        assert seq.indices[0] == 69
        assert seq.valid_length == 1

    def test_truncation(self, alphabet):
        seq = encode("a" * 150, alphabet)
        assert len(seq.indices) == 120
        assert seq.valid_length == 120

    def test_empty_text_is_all_pad(self, alphabet):
        seq = encode("", alphabet)
        assert seq.valid_length == 0
        assert set(seq.indices) == {70}

    def test_case_insensitive(self, alphabet):
        for text in ["Hello World!", "MiXeD 123", "ÄbC"]:
            assert encode(text, alphabet) == encode(text.lower(), alphabet)

    def test_round_trip(self, alphabet):
        text = "you're all #1, right? (maybe) {x}"
        assert decode(encode(text, alphabet), alphabet) == text

    def test_index_range(self, alphabet):
        batch = encode_batch(["anything ☃ goes", "", "x" * 200], alphabet)
        assert batch.shape == (3, 120)
        assert batch.max() <= 70
        assert set(np.unique(batch[batch >= 70])) <= {70}

    def test_empty_batch(self, alphabet):
        assert encode_batch([], alphabet).shape == (0, 120)


class TestWordVocab:

    def test_min_count_one(self):
        vocab = build_word_vocab(["a b", "a c"], min_count=1)
        assert {"a", "b", "c"} <= set(vocab.tokens)
        assert len(vocab) == 5

    def test_min_count_two(self):
        vocab = build_word_vocab(["a b", "a c"], min_count=2)
        assert vocab.tokens[2:] == ["a"]

    def test_unseen_token_is_unknown(self):
        vocab = build_word_vocab(["a b", "a c"], min_count=1)
        ids = vocab.encode("a zebra")
        assert ids[0] == vocab.index["a"]
        assert ids[1] == vocab.unknown_index
        assert (ids[2:] == vocab.pad_index).all()

    def test_truncates_to_max_length(self):
        vocab = build_word_vocab(["a"], min_count=1, max_length=4)
        assert vocab.encode("a a a a a a").shape == (4,)

    def test_tokenize_splits_punctuation(self):
        assert tokenize("Don't, STOP!") == ["don't", ",", "stop", "!"]

    def test_empty_corpus(self):
        with pytest.raises(DegenerateDataError):
            build_word_vocab([])
