"""
Tests for dataset loading, stratified splits, augmentation and the toy corpus.
"""

import json

import numpy as np
import pytest

from hyperhate.errors import (
    DegenerateSplitError,
    RecordError,
    SchemaError,
    ShortfallError,
)
from hyperhate.models.example import (
    GENERATED,
    GOLD,
    HATE,
    NON_HATE,
    AugmentationSpec,
    Dataset,
    Example,
    SplitDataset,
)
from hyperhate.services.data_service import (
    DEFAULT_MARKERS,
    SHIFTED_MARKERS,
    DataService,
    combine_splits,
    detect_format,
    generate_toy_dataset,
    load_examples,
    merge_augmentation,
    parse_label,
    record_lines,
    stratified_split,
    train_count,
    write_generated,
)
from hyperhate.services.evaluation_service import hate_metrics


def make_dataset(n, hate, name="d"):
    examples = [Example(text=f"text {i}", label=HATE if i < hate else NON_HATE)
                for i in range(n)]
    return Dataset(name=name, examples=tuple(examples))


def write_generated_file(tmp_path, name, label, count):
    examples = [Example(f"generated {name} {i}", label, GENERATED) for i in range(count)]
    path = tmp_path / name
    write_generated(examples, str(path))
    return str(path)


# =============================================================================
# Loading
# =============================================================================

class TestLoad:

    def test_csv(self, write_csv):
        path = write_csv("d.csv", ['"a, b",1', "plain text,0", "more,hate", "x,non-hate"])
        data = load_examples(path)
        assert data.texts == ["a, b", "plain text", "more", "x"]
        assert list(data.labels) == [1, 0, 1, 0]
        assert data.name == "d"
        assert all(e.provenance == GOLD for e in data)

    def test_tsv(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("text\tlabel\nhello, there\t0\nbad\tHATE\n", encoding="utf-8")
        data = load_examples(str(path))
        assert data.texts == ["hello, there", "bad"]
        assert list(data.labels) == [0, 1]

    def test_line_json(self, tmp_path):
        path = tmp_path / "d.jsonl"
        rows = [{"text": "one", "label": 1}, {"text": "two", "label": 0}]
        path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
        data = load_examples(str(path))
        assert data.texts == ["one", "two"]
        assert list(data.labels) == [1, 0]

    def test_missing_column(self, write_csv):
        path = write_csv("d.csv", ["a,1"], header="tweet,label")
        with pytest.raises(SchemaError, match="text"):
            load_examples(path)

    def test_bad_label_names_line(self, write_csv):
        path = write_csv("d.csv", ["a,1", "b,maybe"])
        with pytest.raises(RecordError) as info:
            load_examples(path)
        assert info.value.line == 3

    def test_line_counts_quoted_newlines(self, write_csv):
        path = write_csv("d.csv", ['"multi\nline",1', "b,maybe"])
        with pytest.raises(RecordError) as info:
            load_examples(path)
        assert info.value.line == 4
        assert ":4:" in str(info.value)

    def test_line_counts_blank_lines(self, write_csv):
        path = write_csv("d.csv", ["a,1", "", "b,maybe"])
        with pytest.raises(RecordError) as info:
            load_examples(path)
        assert info.value.line == 4

    def test_record_lines_tsv(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text('text\tlabel\n"two\nlines"\t1\n\nc\t0\n', encoding="utf-8")
        assert record_lines(str(path), "tsv") == [2, 5]

    def test_empty_text_is_a_bad_record(self, write_csv):
        path = write_csv("d.csv", ["a,1", '"   ",0'])
        with pytest.raises(RecordError):
            load_examples(path)

    def test_skip_bad_records(self, write_csv):
        path = write_csv("d.csv", ["a,1", "b,maybe", "c,0"])
        data = load_examples(path, skip_bad_records=True)
        assert data.texts == ["a", "c"]

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_examples(str(tmp_path / "absent.csv"))

    def test_unknown_extension(self):
        with pytest.raises(SchemaError):
            detect_format("data.parquet")

    def test_known_corpus_metadata(self, write_csv):
        path = write_csv("d.csv", ["a,1", "b,0"])
        data = load_examples(path, name="DV")
        assert data.declared_size == 6000
        assert data.declared_hate_fraction == 0.24
        assert len(data) == 2

    @pytest.mark.parametrize("raw, label", [
        ("1", HATE), ("0", NON_HATE), ("Hate", HATE), ("NON-HATE", NON_HATE), (1.0, HATE),
    ])
    def test_parse_label(self, raw, label):
        assert parse_label(raw) == label


# =============================================================================
# Splits
# =============================================================================

class TestStratifiedSplit:

    def test_counts(self):
        split = stratified_split(make_dataset(100, 24), 0.8, seed=0)
        assert len(split.train) == 80
        assert split.train.hate_count == 19
        assert len(split.test) == 20
        assert split.test.hate_count == 5

    def test_disjoint_and_complete(self):
        data = make_dataset(57, 13)
        split = stratified_split(data, 0.8, seed=3)
        train, test = set(split.train.texts), set(split.test.texts)
        assert not train & test
        assert train | test == set(data.texts)

    def test_same_seed_same_split(self):
        data = make_dataset(100, 24)
        assert stratified_split(data, seed=5) == stratified_split(data, seed=5)
        assert stratified_split(data, seed=5).train != stratified_split(data, seed=6).train

    def test_keeps_file_order(self):
        data = make_dataset(30, 10)
        split = stratified_split(data, seed=1)
        order = {t: i for i, t in enumerate(data.texts)}
        positions = [order[t] for t in split.train.texts]
        assert positions == sorted(positions)

    @pytest.mark.parametrize("fraction", [0.0, 1.0, 1.5])
    def test_fraction_range(self, fraction):
        with pytest.raises(ValueError):
            stratified_split(make_dataset(10, 5), fraction)

    def test_singleton_class(self):
        with pytest.raises(DegenerateSplitError):
            stratified_split(make_dataset(10, 1))

    @pytest.mark.parametrize("size, fraction, expected", [
        (24, 0.8, 19), (76, 0.8, 61), (2, 0.8, 1), (2, 0.1, 1), (10, 0.95, 9), (5, 0.5, 3),
    ])
    def test_train_count(self, size, fraction, expected):
        assert train_count(size, fraction) == expected


class TestDataService:

    def test_paired_files(self, write_csv):
        train = write_csv("a_train.csv", ["x,1", "y,0"])
        test = write_csv("a_test.csv", ["z,0"])
        split = DataService().load_split([train], [test])
        assert split.train.texts == ["x", "y"]
        assert split.test.texts == ["z"]
        assert split.test.name == split.train.name

    def test_single_file_is_split(self, write_csv):
        rows = [f"h{i},1" for i in range(5)] + [f"n{i},0" for i in range(15)]
        split = DataService().load_split([write_csv("a.csv", rows)])
        assert len(split.train) == 16
        assert split.train.hate_count == 4

    def test_combined(self, write_csv):
        a = write_csv("a.csv", ["a1,1", "a2,0"])
        b = write_csv("b.csv", ["b1,1", "b2,0"])
        split = DataService().load_split([a, b], [a, b])
        assert split.name == "combined"
        assert split.train.texts == ["a1", "a2", "b1", "b2"]

    def test_more_tests_than_trains(self, write_csv):
        a = write_csv("a.csv", ["a1,1", "a2,0"])
        with pytest.raises(ValueError):
            DataService().load_split([a], [a, a])


def test_combine_splits_keeps_member_order():
    one = stratified_split(make_dataset(10, 4, "one"), seed=0)
    two = stratified_split(make_dataset(10, 4, "two"), seed=0)
    combined = combine_splits([one, two])
    assert isinstance(combined, SplitDataset)
    assert combined.train.examples == one.train.examples + two.train.examples
    assert combined.test.examples == one.test.examples + two.test.examples


# =============================================================================
# Augmentation
# =============================================================================

class TestAugmentation:

    @pytest.fixture
    def gold(self):
        return make_dataset(10, 4)

    def test_zero_is_identity(self, gold):
        assert merge_augmentation(gold, AugmentationSpec(None, None, 0)) is gold

    def test_balanced_merge(self, tmp_path, gold):
        spec = AugmentationSpec(write_generated_file(tmp_path, "h.tsv", HATE, 10),
                                write_generated_file(tmp_path, "n.tsv", NON_HATE, 10), 8)
        merged = merge_augmentation(gold, spec)
        assert len(merged) == 18
        assert merged.examples[:10] == gold.examples
        added = merged.examples[10:]
        assert all(e.provenance == GENERATED for e in added)
        assert sum(e.label for e in added) == 4
        # file order: the first records of each file
        assert added[0].text == "generated h.tsv 0"

    def test_shortfall(self, tmp_path, gold):
        spec = AugmentationSpec(write_generated_file(tmp_path, "h.tsv", HATE, 10),
                                write_generated_file(tmp_path, "n.tsv", NON_HATE, 3), 8)
        with pytest.raises(ShortfallError) as info:
            merge_augmentation(gold, spec)
        assert info.value.available == {"hate": 4, "non-hate": 3}

    def test_wrong_class_in_file(self, tmp_path, gold):
        spec = AugmentationSpec(write_generated_file(tmp_path, "h.tsv", NON_HATE, 4),
                                write_generated_file(tmp_path, "n.tsv", NON_HATE, 4), 4)
        with pytest.raises(RecordError):
            merge_augmentation(gold, spec)

    @pytest.mark.parametrize("size", [-2, 3])
    def test_invalid_size(self, size):
        with pytest.raises(ValueError):
            AugmentationSpec("h", "n", size)

    def test_needs_both_files(self):
        with pytest.raises(ValueError):
            AugmentationSpec("h", None, 4)


# =============================================================================
# Toy corpus
# =============================================================================

def has_marker(text, markers=DEFAULT_MARKERS):
    return any(m in text.split() for m in markers)


class TestToyDataset:

    def test_balanced(self):
        data = generate_toy_dataset(64, seed=2)
        assert len(data) == 64
        assert data.hate_count == 32

    def test_marker_oracle_is_perfect_without_noise(self):
        data = generate_toy_dataset(200, noise=0.0, seed=4)
        predictions = np.array([1.0 if has_marker(t) else 0.0 for t in data.texts])
        assert hate_metrics(predictions, data.labels).f1 == 1.0

    def test_noise_drops_hate_markers_only(self):
        data = generate_toy_dataset(400, noise=0.2, seed=4)
        predictions = np.array([1.0 if has_marker(t) else 0.0 for t in data.texts])
        report = hate_metrics(predictions, data.labels)
        assert report.precision == 1.0
        assert 0.7 < report.recall < 0.9

    def test_noise_never_marks_non_hate(self):
        for seed in range(10):
            data = generate_toy_dataset(100, noise=0.5, seed=seed)
            assert not any(has_marker(e.text) for e in data if e.label == NON_HATE)

    def test_full_noise_removes_every_marker(self):
        data = generate_toy_dataset(50, noise=1.0, seed=2)
        assert not any(has_marker(t) for t in data.texts)

    def test_noise_words_avoid_marker_letters(self):
        data = generate_toy_dataset(100, seed=9)
        for text in data.texts:
            for word in text.split():
                if word not in DEFAULT_MARKERS:
                    assert not set(word) & set("qxzj")

    def test_shifted_markers(self):
        data = generate_toy_dataset(50, seed=1, markers=SHIFTED_MARKERS)
        assert not any(has_marker(t) for t in data.texts)
        assert all(has_marker(t, SHIFTED_MARKERS) == (label == HATE)
                   for t, label in zip(data.texts, data.labels))

    def test_seeded(self):
        assert generate_toy_dataset(20, seed=3) == generate_toy_dataset(20, seed=3)

    @pytest.mark.parametrize("n", [0, 7])
    def test_invalid_size(self, n):
        with pytest.raises(ValueError):
            generate_toy_dataset(n)
