"""
Training and run configuration records.
"""

import json
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional

MODEL_KINDS = ("plain", "static", "dynamic", "cnngru")


@dataclass(frozen=True)
class TrainConfig:
    """
    Hyperparameters of one training run.
    """
    model_kind: str = "static"
    batch_size: int = 32
    max_epochs: int = 200
    lr: float = 1e-3
    patience: int = 3
    validation_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        """Validate ranges."""
        if self.model_kind not in MODEL_KINDS:
            raise ValueError(f"model kind must be one of {MODEL_KINDS}, got {self.model_kind!r}")
        if not 0.0 < self.validation_fraction < 0.5:
            raise ValueError(
                f"validation fraction must be in (0, 0.5), got {self.validation_fraction}")
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")
        if self.batch_size < 1:
            raise ValueError(f"batch size must be >= 1, got {self.batch_size}")
        if self.max_epochs < 1:
            raise ValueError(f"max epochs must be >= 1, got {self.max_epochs}")
        if self.lr <= 0:
            raise ValueError(f"learning rate must be positive, got {self.lr}")

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass
class RunConfig:
    """
    Fully resolved configuration of one CLI invocation.

    Serialised as flat ``key=value`` lines next to the outputs so that the
    run can be replayed with ``--config``.
    """
    command: str
    out: str = "."
    model: Optional[str] = None
    train: List[str] = field(default_factory=list)
    test: List[str] = field(default_factory=list)
    dataset: List[str] = field(default_factory=list)
    target_dataset: Optional[str] = None
    target_train: Optional[str] = None
    target_test: Optional[str] = None
    aug_hate: Optional[str] = None
    aug_nonhate: Optional[str] = None
    aug_n: int = 0
    grid: List[int] = field(default_factory=lambda: [0])
    seeds: List[int] = field(default_factory=lambda: [0])
    seed: int = 0
    lr: float = 1e-3
    epochs: int = 200
    patience: int = 3
    batch_size: int = 32
    validation_fraction: float = 0.1
    train_fraction: float = 0.8
    threshold: float = 0.5
    format: Optional[str] = None
    checkpoint: Optional[str] = None
    input: Optional[str] = None
    text: List[str] = field(default_factory=list)
    precision: str = "double"
    workers: int = 0
    n: int = 64
    noise: float = 0.0
    log_level: str = "INFO"
    skip_bad_records: bool = False
    shift: bool = False

    @classmethod
    def from_settings(cls, command: str, settings: Dict[str, Any]) -> "RunConfig":
        """Build from a resolved settings mapping, ignoring keys that are not fields."""
        known = {f.name for f in fields(cls)} - {"command"}
        return cls(command=command, **{k: v for k, v in settings.items() if k in known})

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            model_kind=self.model or "static",
            batch_size=self.batch_size,
            max_epochs=self.epochs,
            lr=self.lr,
            patience=self.patience,
            validation_fraction=self.validation_fraction,
            seed=self.seed,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_flat(self) -> str:
        """``key=value`` lines in field order; lists are JSON arrays, None is omitted."""
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, list):
                value = json.dumps(value)
            lines.append(f"{f.name}={value}")
        return "\n".join(lines) + "\n"
