"""
Dataset ingestion, stratified splitting, augmentation merging and the toy
dataset generator.
"""

import csv
import logging
import math
import os
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

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
from hyperhate.services.config_service import ConfigService

logger = logging.getLogger(__name__)

FORMATS = ("csv", "tsv", "line-json")

_EXTENSIONS = {
    ".csv": "csv",
    ".tsv": "tsv",
    ".txt": "tsv",
    ".jsonl": "line-json",
    ".ndjson": "line-json",
    ".json": "line-json",
}

_LABELS = {
    "1": HATE, "hate": HATE,
    "0": NON_HATE, "non-hate": NON_HATE, "nonhate": NON_HATE, "non_hate": NON_HATE,
}

# Toy corpus: marker trigrams use only q, x, z, j, which the noise words never contain.
DEFAULT_MARKERS: Tuple[str, ...] = ("zqx", "qzj", "xjq")
SHIFTED_MARKERS: Tuple[str, ...] = ("jxz", "zzq", "qjj")
_NOISE_LETTERS = np.array(list("abcdefghiklmnoprstuvwy"))


def detect_format(path: str) -> str:
    ext = os.path.splitext(path)[1].lower()
    try:
        return _EXTENSIONS[ext]
    except KeyError:
        raise SchemaError(f"cannot infer the format from extension {ext!r}; "
                          f"pass one of {FORMATS}", path)


def parse_label(raw, path: str = None, line: int = None) -> int:
    """Map 0/1 or hate/non-hate (any case) to the integer label."""
    key = str(raw).strip().lower()
    if key.endswith(".0"):
        key = key[:-2]
    if key not in _LABELS:
        raise RecordError(f"unparseable label {raw!r}", path, line)
    return _LABELS[key]


def _read_frame(path: str, fmt: str) -> pd.DataFrame:
    try:
        if fmt == "line-json":
            frame = pd.read_json(path, lines=True, dtype=False)
        else:
            frame = pd.read_csv(path, sep="," if fmt == "csv" else "\t", dtype=str,
                                keep_default_na=False, encoding="utf-8")
    except FileNotFoundError:
        raise
    except (ValueError, pd.errors.ParserError) as e:
        raise SchemaError(f"cannot parse {fmt} file: {e}", path)
    return frame


def record_lines(path: str, fmt: str) -> List[int]:
    """
    Physical line on which each data record starts, in file order.

    Blank lines are not records; a quoted csv/tsv field may span lines.
    """
    lines = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        if fmt == "line-json":
            return [number for number, raw in enumerate(f, start=1) if raw.strip()]
        reader = csv.reader(f, delimiter="," if fmt == "csv" else "\t")
        end = 0
        for row in reader:
            start, end = end + 1, reader.line_num
            if row:
                lines.append(start)
    # the first record is the header
    return lines[1:]


def load_examples(path: str, format: Optional[str] = None, name: Optional[str] = None,
                  skip_bad_records: bool = False,
                  config_service: Optional[ConfigService] = None) -> Dataset:
    """
    Load a labeled file with ``text`` and ``label`` columns.

    Args:
        path: File to read (UTF-8)
        format: "csv", "tsv" or "line-json"; inferred from the extension if omitted
        name: Dataset name; defaults to the file stem
        skip_bad_records: Skip unparseable records with a count instead of failing
        config_service: Source of published corpus metadata for known names

    Returns:
        Dataset of gold examples in file order

    Raises:
        SchemaError: If a required column is missing
        RecordError: On the first bad record unless ``skip_bad_records``
    """
    fmt = format or detect_format(path)
    if fmt not in FORMATS:
        raise SchemaError(f"unknown format {fmt!r}; expected one of {FORMATS}", path)
    frame = _read_frame(path, fmt)
    for column in ("text", "label"):
        if column not in frame.columns:
            raise SchemaError(f"missing column {column!r} (found {list(frame.columns)})", path, 1)

    examples, skipped = [], 0
    lines: Optional[List[int]] = None
    for index, (text, raw_label) in enumerate(zip(frame["text"], frame["label"])):
        problem = None
        if not isinstance(text, str) or not text.strip():
            problem = "empty text"
        else:
            try:
                label = parse_label(raw_label)
            except RecordError as e:
                problem = str(e)
        if problem is None:
            examples.append(Example(text=text, label=label))
            continue
        if lines is None:
            lines = record_lines(path, fmt)
        error = RecordError(problem, path, lines[index])
        if not skip_bad_records:
            logger.error(str(error))
            raise error
        skipped += 1
    if skipped:
        logger.warning(f"Skipped {skipped} bad records in {path}")

    name = name or os.path.splitext(os.path.basename(path))[0]
    info = (config_service or ConfigService()).get_dataset_info(name) or {}
    dataset = Dataset(name=name, examples=tuple(examples),
                      declared_size=info.get("size"),
                      declared_hate_fraction=info.get("hate_fraction"))
    logger.info(f"Loaded {len(dataset)} examples from {path} "
                f"({dataset.hate_count} hate, {dataset.hate_fraction:.1%})")
    return dataset


def train_count(class_size: int, train_fraction: float) -> int:
    """Round-half-up share of a class that goes to train, leaving each side at least one."""
    k = int(math.floor(train_fraction * class_size + 0.5))
    return min(max(k, 1), class_size - 1)


def stratified_split(dataset: Dataset, train_fraction: float = 0.8,
                     seed: int = 0) -> SplitDataset:
    """
    Per-class seeded split: each class is shuffled and its rounded
    ``train_fraction`` share goes to train, the rest to test.

    Both halves keep the original file order.

    Raises:
        ValueError: If train_fraction is not strictly between 0 and 1
        DegenerateSplitError: If a class has fewer than two members
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train fraction must be in (0, 1), got {train_fraction}")
    labels = dataset.labels
    rng = np.random.default_rng(seed)
    train_idx = []
    for label in (NON_HATE, HATE):
        members = np.flatnonzero(labels == label)
        if members.size < 2:
            raise DegenerateSplitError(
                f"{dataset.name}: class {label} has {members.size} examples, a split needs 2")
        chosen = rng.permutation(members)[:train_count(members.size, train_fraction)]
        train_idx.extend(chosen.tolist())
    in_train = np.zeros(len(dataset), dtype=bool)
    in_train[train_idx] = True
    examples = dataset.examples
    train = dataset.with_examples([e for e, t in zip(examples, in_train) if t])
    test = dataset.with_examples([e for e, t in zip(examples, in_train) if not t])
    logger.info(f"Split {dataset.name}: train {len(train)} ({train.hate_count} hate), "
                f"test {len(test)} ({test.hate_count} hate)")
    return SplitDataset(name=dataset.name, train=train, test=test)


def combine_splits(splits: Sequence[SplitDataset], name: str = "combined") -> SplitDataset:
    """Union of member train splits and union of member test splits, in member order."""
    if not splits:
        raise ValueError("nothing to combine")
    train = Dataset(name=name, examples=tuple(e for s in splits for e in s.train))
    test = Dataset(name=name, examples=tuple(e for s in splits for e in s.test))
    logger.info(f"Combined {[s.name for s in splits]} into {len(train)} train / {len(test)} test")
    return SplitDataset(name=name, train=train, test=test)


def read_generated(path: str, expected_label: int, limit: int) -> List[Example]:
    """
    First ``limit`` records of a generated file (``text<TAB>class`` per line).
    """
    frame = pd.read_csv(path, sep="\t", header=None, names=["text", "label"], nrows=limit,
                        dtype=str, keep_default_na=False, quoting=csv.QUOTE_NONE,
                        encoding="utf-8")
    examples = []
    for line, (text, raw_label) in enumerate(zip(frame["text"], frame["label"]), start=1):
        label = parse_label(raw_label, path, line)
        if label != expected_label:
            raise RecordError(f"class {label} in a file of class {expected_label}", path, line)
        if not text.strip():
            raise RecordError("empty text", path, line)
        examples.append(Example(text=text, label=label, provenance=GENERATED))
    return examples


def merge_augmentation(gold_train: Dataset, spec: AugmentationSpec) -> Dataset:
    """
    Append the first n/2 generated records of each class to the gold train split.

    Raises:
        ShortfallError: If a class file holds fewer than n/2 records
    """
    if spec.size == 0:
        return gold_train
    per_class = spec.per_class
    hate = read_generated(spec.hate_path, HATE, per_class)
    nonhate = read_generated(spec.nonhate_path, NON_HATE, per_class)
    available = {"hate": len(hate), "non-hate": len(nonhate)}
    if len(hate) < per_class or len(nonhate) < per_class:
        message = (f"augmentation of {spec.size} needs {per_class} records per class, "
                   f"available: {available}")
        logger.error(message)
        raise ShortfallError(message, available)
    merged = gold_train.with_examples(gold_train.examples + tuple(hate) + tuple(nonhate))
    logger.info(f"Augmented {gold_train.name}: {len(gold_train)} gold + {spec.size} generated")
    return merged


def _noise_word(rng: np.random.Generator) -> str:
    return "".join(rng.choice(_NOISE_LETTERS, size=int(rng.integers(2, 8))))


def generate_toy_dataset(n: int, noise: float = 0.0, seed: int = 0,
                         markers: Sequence[str] = DEFAULT_MARKERS, name: str = "toy",
                         provenance: str = GOLD) -> Dataset:
    """
    Build a balanced toy corpus of n examples.

    Hate texts contain one marker trigram as a word among random noise
    words; non-hate texts never contain one. With probability ``noise`` a
    hate text loses its marker while keeping its label, so a marker oracle
    keeps precision 1 and its recall drops to about ``1 - noise``.
    """
    if n <= 0 or n % 2:
        raise ValueError(f"toy dataset size must be a positive even number, got {n}")
    if not 0.0 <= noise <= 1.0:
        raise ValueError(f"noise must be a probability, got {noise}")
    rng = np.random.default_rng(seed)
    labels = np.array([HATE] * (n // 2) + [NON_HATE] * (n // 2))
    examples = []
    for label in rng.permutation(labels):
        words = [_noise_word(rng) for _ in range(int(rng.integers(4, 11)))]
        # one draw per example, whatever its label
        dropped = rng.random() < noise
        if label == HATE and not dropped:
            words.insert(int(rng.integers(0, len(words) + 1)), str(rng.choice(list(markers))))
        examples.append(Example(text=" ".join(words), label=int(label), provenance=provenance))
    return Dataset(name=name, examples=tuple(examples))


def write_examples(dataset: Dataset, path: str) -> None:
    """Write ``text,label`` CSV with a header."""
    frame = pd.DataFrame({"text": dataset.texts, "label": dataset.labels})
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    logger.info(f"Wrote {len(dataset)} examples to {path}")


def write_generated(examples: Iterable[Example], path: str) -> int:
    """Write ``text<TAB>class`` lines without a header; returns the record count."""
    rows = [(" ".join(e.text.split()), e.label) for e in examples]
    frame = pd.DataFrame(rows, columns=["text", "label"])
    frame.to_csv(path, sep="\t", header=False, index=False, quoting=csv.QUOTE_NONE,
                 encoding="utf-8", lineterminator="\n")
    return len(rows)


class DataService:
    """
    Service for turning file arguments into a fixed train / test split.
    """

    def __init__(self, config_service: Optional[ConfigService] = None,
                 skip_bad_records: bool = False):
        self.config_service = config_service or ConfigService()
        self.skip_bad_records = skip_bad_records

    def load(self, path: str, format: Optional[str] = None,
             name: Optional[str] = None) -> Dataset:
        return load_examples(path, format, name, self.skip_bad_records, self.config_service)

    def load_split(self, train_paths: Sequence[str], test_paths: Sequence[str] = (),
                   names: Sequence[str] = (), format: Optional[str] = None,
                   train_fraction: float = 0.8, seed: int = 0) -> SplitDataset:
        """
        Materialise the gold split of one or more datasets.

        Each train file pairs with the test file at the same position; a
        train file without a test file is split with ``stratified_split``.
        Several datasets are joined into the "combined" dataset.
        """
        if not train_paths:
            raise ValueError("at least one training file is required")
        if len(test_paths) > len(train_paths):
            raise ValueError(f"{len(test_paths)} test files for {len(train_paths)} train files")
        splits = []
        for i, train_path in enumerate(train_paths):
            name = names[i] if i < len(names) else None
            train = self.load(train_path, format, name)
            if i < len(test_paths):
                test = self.load(test_paths[i], format, train.name)
                splits.append(SplitDataset(name=train.name, train=train, test=test))
            else:
                splits.append(stratified_split(train, train_fraction, seed))
        if len(splits) == 1:
            return splits[0]
        return combine_splits(splits)
