"""
Labeled example and dataset records.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from hyperhate.errors import InvalidLabelError, RecordError

HATE = 1
NON_HATE = 0

GOLD = "gold"
GENERATED = "generated"
PROVENANCES = (GOLD, GENERATED)


@dataclass(frozen=True)
class Example:
    """
    A single labeled text: label 1 is hate, 0 is non-hate.
    """
    text: str
    label: int
    provenance: str = GOLD

    def __post_init__(self):
        """Validate the label, the provenance and the text."""
        if self.label not in (HATE, NON_HATE) or isinstance(self.label, bool):
            raise InvalidLabelError(f"label must be 0 or 1, got {self.label!r}")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}, got {self.provenance!r}")
        if not isinstance(self.text, str) or not self.text.strip():
            raise RecordError("example text is empty after trimming")

    def to_dict(self) -> Dict[str, Any]:
        return {"text": self.text, "label": self.label, "provenance": self.provenance}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Example":
        return cls(
            text=data.get("text", ""),
            label=int(data.get("label")),
            provenance=data.get("provenance", GOLD),
        )


@dataclass(frozen=True)
class Dataset:
    """
    A named, immutable collection of examples.

    ``declared_size`` and ``declared_hate_fraction`` carry published corpus
    metadata when the name is a known corpus; they never affect computation.
    """
    name: str
    examples: Tuple[Example, ...] = field(default_factory=tuple)
    declared_size: Optional[int] = None
    declared_hate_fraction: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.examples, tuple):
            object.__setattr__(self, "examples", tuple(self.examples))

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    @property
    def texts(self) -> List[str]:
        return [e.text for e in self.examples]

    @property
    def labels(self) -> np.ndarray:
        return np.asarray([e.label for e in self.examples], dtype=np.int64)

    @property
    def hate_count(self) -> int:
        return sum(1 for e in self.examples if e.label == HATE)

    @property
    def hate_fraction(self) -> float:
        return self.hate_count / len(self.examples) if self.examples else 0.0

    def class_counts(self) -> Dict[int, int]:
        hate = self.hate_count
        return {NON_HATE: len(self.examples) - hate, HATE: hate}

    def with_examples(self, examples: Iterable[Example], name: Optional[str] = None) -> "Dataset":
        """Copy carrying the same metadata but different examples."""
        return Dataset(
            name=name or self.name,
            examples=tuple(examples),
            declared_size=self.declared_size,
            declared_hate_fraction=self.declared_hate_fraction,
        )

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "name": self.name,
            "examples": [e.to_dict() for e in self.examples],
        }
        if self.declared_size is not None:
            result["declared_size"] = self.declared_size
        if self.declared_hate_fraction is not None:
            result["declared_hate_fraction"] = self.declared_hate_fraction
        return result

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Dataset":
        return cls(
            name=data.get("name", "dataset"),
            examples=tuple(Example.from_dict(e) for e in data.get("examples", [])
                           if isinstance(e, dict)),
            declared_size=data.get("declared_size"),
            declared_hate_fraction=data.get("declared_hate_fraction"),
        )


@dataclass(frozen=True)
class SplitDataset:
    """A dataset with its fixed gold train / test split materialised."""
    name: str
    train: Dataset
    test: Dataset


@dataclass(frozen=True)
class AugmentationSpec:
    """
    Class-balanced augmentation request: ``size`` generated records,
    half drawn from each per-class file in file order.
    """
    hate_path: Optional[str]
    nonhate_path: Optional[str]
    size: int = 0

    def __post_init__(self):
        if self.size < 0:
            raise ValueError(f"augmentation size must be >= 0, got {self.size}")
        if self.size % 2:
            raise ValueError(f"augmentation size must be even to balance classes, got {self.size}")
        if self.size and not (self.hate_path and self.nonhate_path):
            raise ValueError("augmentation needs both a hate and a non-hate generated file")

    @property
    def per_class(self) -> int:
        return self.size // 2

    def to_dict(self) -> Dict[str, Any]:
        return {"hate_path": self.hate_path, "nonhate_path": self.nonhate_path, "size": self.size}
