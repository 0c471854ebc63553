"""
Intra- and cross-domain experiments over augmentation grids.

Each (model kind, n, seed) grid cell trains from scratch on the source gold
train split plus n generated records and is evaluated on the target gold
test split. Cells are independent and may run in a process pool.
"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence

from hyperhate.errors import ExperimentError, HyperHateError
from hyperhate.models.example import AugmentationSpec, Dataset, SplitDataset
from hyperhate.models.report import ExperimentRow, ExperimentSpec
from hyperhate.models.run_config import TrainConfig
from hyperhate.services.data_service import merge_augmentation
from hyperhate.services.prediction_service import evaluate_model
from hyperhate.services.training_service import TrainingService

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridCell:
    """Everything one grid cell needs; picklable for worker processes."""
    model_kind: str
    n: int
    seed: int
    source: str
    target: str
    train: Dataset
    test: Dataset
    aug_hate: Optional[str]
    aug_nonhate: Optional[str]
    config: TrainConfig
    threshold: float
    architecture: Dict[str, Any]

    def describe(self) -> str:
        return (f"model={self.model_kind} {self.source}->{self.target} "
                f"n={self.n} seed={self.seed}")


def run_cell(cell: GridCell) -> ExperimentRow:
    """Train and evaluate one grid cell; failures carry the cell description."""
    try:
        config = replace(cell.config, model_kind=cell.model_kind, seed=cell.seed)
        train_data = merge_augmentation(
            cell.train, AugmentationSpec(cell.aug_hate, cell.aug_nonhate, cell.n))
        service = TrainingService()
        model = service.build_model(config, cell.architecture)
        service.train(model, train_data, config)
        report = evaluate_model(model, cell.test, cell.threshold, augmentation=cell.n)
    except HyperHateError as e:
        logger.error(f"Grid cell {cell.describe()} failed: {e}")
        raise ExperimentError(f"grid cell {cell.describe()}: {e}") from e
    logger.info(f"Grid cell {cell.describe()} done: F1={report.f1:.4f}")
    return ExperimentRow.from_report(report, cell.model_kind, cell.source, cell.target,
                                     cell.n, cell.seed)


def resolve_workers(workers: int) -> int:
    """0 means one worker per available core."""
    if workers < 0:
        raise ValueError(f"worker count must be >= 0, got {workers}")
    return workers or os.cpu_count() or 1


def validate_grid(grid: Sequence[int]) -> None:
    if not grid:
        raise ExperimentError("augmentation grid is empty")
    for n in grid:
        if n < 0 or n % 2:
            raise ExperimentError(f"augmentation size {n} must be a non-negative even number")
    if list(grid) != sorted(set(grid)):
        raise ExperimentError(f"augmentation grid must be strictly increasing, got {list(grid)}")


class ExperimentService:
    """
    Service running experiment grids.
    """

    def __init__(self, base_config: Optional[TrainConfig] = None, threshold: float = 0.5,
                 workers: int = 1, architectures: Optional[Dict[str, Dict[str, Any]]] = None):
        """
        Args:
            base_config: Training hyperparameters shared by all cells
            threshold: Decision threshold for the reports
            workers: Size of the process pool; 1 runs in-process, 0 uses every core
            architectures: Architecture settings per model kind
        """
        self.base_config = base_config or TrainConfig()
        self.threshold = threshold
        self.workers = resolve_workers(workers)
        self.architectures = architectures or {}

    def _cells(self, spec: ExperimentSpec, source: SplitDataset, target: SplitDataset,
               aug_hate: Optional[str], aug_nonhate: Optional[str]) -> List[GridCell]:
        validate_grid(spec.grid)
        if any(spec.grid) and not (aug_hate and aug_nonhate):
            raise ExperimentError(f"grid {list(spec.grid)} needs generated hate and non-hate files")
        return [
            GridCell(model_kind=kind, n=n, seed=seed, source=spec.source, target=spec.target,
                     train=source.train, test=target.test, aug_hate=aug_hate,
                     aug_nonhate=aug_nonhate, config=self.base_config, threshold=self.threshold,
                     architecture=self.architectures.get(kind, {}))
            for kind in spec.model_kinds for n in spec.grid for seed in spec.seeds
        ]

    def run(self, spec: ExperimentSpec, source: SplitDataset, target: SplitDataset,
            aug_hate: Optional[str] = None, aug_nonhate: Optional[str] = None) -> List[ExperimentRow]:
        cells = self._cells(spec, source, target, aug_hate, aug_nonhate)
        logger.info(f"Running {len(cells)} grid cells for {spec.source}->{spec.target} "
                    f"with {min(self.workers, len(cells))} worker(s)")
        if self.workers == 1 or len(cells) == 1:
            return [run_cell(cell) for cell in cells]
        with ProcessPoolExecutor(max_workers=min(self.workers, len(cells))) as pool:
            return list(pool.map(run_cell, cells))

    def run_intra_experiment(self, dataset: SplitDataset, model_kinds: Sequence[str],
                             grid: Sequence[int] = (0,), seeds: Sequence[int] = (0,),
                             aug_hate: Optional[str] = None,
                             aug_nonhate: Optional[str] = None) -> List[ExperimentRow]:
        """Train on gold-train (+ augmentation), evaluate on the same dataset's gold-test."""
        spec = ExperimentSpec(source=dataset.name, target=dataset.name, grid=tuple(grid),
                              model_kinds=tuple(model_kinds), seeds=tuple(seeds))
        return self.run(spec, dataset, dataset, aug_hate, aug_nonhate)

    def run_cross_experiment(self, source: SplitDataset, target: SplitDataset,
                             model_kinds: Sequence[str], grid: Sequence[int] = (0,),
                             seeds: Sequence[int] = (0,), aug_hate: Optional[str] = None,
                             aug_nonhate: Optional[str] = None) -> List[ExperimentRow]:
        """
        Train on the source gold-train (+ source-side augmentation), evaluate
        on the target gold-test.

        Raises:
            ExperimentError: If source and target are the same dataset
        """
        if source.name == target.name:
            raise ExperimentError(
                f"cross-domain run needs different datasets, got {source.name} twice; "
                f"use the intra-domain runner")
        spec = ExperimentSpec(source=source.name, target=target.name, grid=tuple(grid),
                              model_kinds=tuple(model_kinds), seeds=tuple(seeds))
        return self.run(spec, source, target, aug_hate, aug_nonhate)
