"""
Training history records.
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class EpochRecord:
    """Losses and validation hate-F1 of one epoch."""
    epoch: int
    train_loss: float
    val_loss: float
    val_f1: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epoch": self.epoch,
            "train_loss": self.train_loss,
            "val_loss": self.val_loss,
            "val_f1": self.val_f1,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EpochRecord":
        return cls(
            epoch=int(data["epoch"]),
            train_loss=float(data["train_loss"]),
            val_loss=float(data["val_loss"]),
            val_f1=float(data["val_f1"]),
        )


@dataclass
class TrainHistory:
    """
    Per-epoch records of a training run.

    ``best_epoch`` is the index (into ``epochs``) of the lowest validation
    loss; on ties the earliest epoch wins.
    """
    epochs: List[EpochRecord] = field(default_factory=list)
    stopped_early: bool = False

    @property
    def val_losses(self) -> List[float]:
        return [e.val_loss for e in self.epochs]

    @property
    def train_losses(self) -> List[float]:
        return [e.train_loss for e in self.epochs]

    @property
    def best_epoch(self) -> Optional[int]:
        if not self.epochs:
            return None
        losses = self.val_losses
        return losses.index(min(losses))

    @property
    def best_val_loss(self) -> Optional[float]:
        best = self.best_epoch
        return None if best is None else self.epochs[best].val_loss

    def append(self, record: EpochRecord) -> None:
        self.epochs.append(record)

    def to_lines(self) -> str:
        """Line-delimited JSON records, one per epoch."""
        return "".join(json.dumps(e.to_dict(), sort_keys=True) + "\n" for e in self.epochs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epochs": [e.to_dict() for e in self.epochs],
            "best_epoch": self.best_epoch,
            "stopped_early": self.stopped_early,
        }
