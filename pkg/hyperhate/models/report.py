"""
Evaluation and experiment records.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

RESULT_FIELDS: Tuple[str, ...] = (
    "model", "source", "target", "n", "seed",
    "precision", "recall", "f1", "tp", "fp", "fn", "tn",
)


@dataclass(frozen=True)
class EvalReport:
    """Hate-class precision, recall and F1 with the underlying confusion counts."""
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int
    dataset: str = ""
    model: str = ""
    augmentation: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dataset": self.dataset,
            "model": self.model,
            "augmentation": self.augmentation,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EvalReport":
        return cls(
            precision=float(data["precision"]),
            recall=float(data["recall"]),
            f1=float(data["f1"]),
            tp=int(data["tp"]),
            fp=int(data["fp"]),
            fn=int(data["fn"]),
            tn=int(data["tn"]),
            dataset=data.get("dataset", ""),
            model=data.get("model", ""),
            augmentation=int(data.get("augmentation", 0)),
        )


@dataclass(frozen=True)
class ExperimentSpec:
    """
    Source / target pair, augmentation grid, model kinds and seeds.

    The experiment is intra-domain exactly when source and target coincide.
    """
    source: str
    target: str
    grid: Tuple[int, ...] = (0,)
    model_kinds: Tuple[str, ...] = ("static",)
    seeds: Tuple[int, ...] = (0,)

    @property
    def intra_domain(self) -> bool:
        return self.source == self.target

    def to_dict(self) -> Dict[str, Any]:
        return {
            "source": self.source,
            "target": self.target,
            "grid": list(self.grid),
            "model_kinds": list(self.model_kinds),
            "seeds": list(self.seeds),
        }


@dataclass(frozen=True)
class ExperimentRow:
    """One grid cell result: model, dataset pair, augmentation size, seed, metrics."""
    model: str
    source: str
    target: str
    n: int
    seed: int
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int

    @classmethod
    def from_report(cls, report: EvalReport, model: str, source: str, target: str,
                    n: int, seed: int) -> "ExperimentRow":
        return cls(model=model, source=source, target=target, n=n, seed=seed,
                   precision=report.precision, recall=report.recall, f1=report.f1,
                   tp=report.tp, fp=report.fp, fn=report.fn, tn=report.tn)

    @property
    def sort_key(self):
        return (self.model, self.source, self.target, self.n, self.seed)

    def to_dict(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in RESULT_FIELDS}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentRow":
        return cls(
            model=str(data["model"]),
            source=str(data["source"]),
            target=str(data["target"]),
            n=int(data["n"]),
            seed=int(data["seed"]),
            precision=float(data["precision"]),
            recall=float(data["recall"]),
            f1=float(data["f1"]),
            tp=int(data["tp"]),
            fp=int(data["fp"]),
            fn=int(data["fn"]),
            tn=int(data["tn"]),
        )


@dataclass(frozen=True)
class ComparisonRow:
    """
    Baseline (no augmentation) against the largest augmentation of a grid,
    for one metric, with the relative change in percent.
    """
    model: str
    source: str
    target: str
    seed: int
    metric: str
    baseline: float
    augmented: float
    augmented_n: int

    @property
    def change_percent(self) -> Optional[float]:
        if self.baseline == 0:
            return None
        return 100.0 * (self.augmented - self.baseline) / self.baseline

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model,
            "source": self.source,
            "target": self.target,
            "seed": self.seed,
            "metric": self.metric,
            "baseline": self.baseline,
            "augmented": self.augmented,
            "augmented_n": self.augmented_n,
            "change_percent": self.change_percent,
        }
