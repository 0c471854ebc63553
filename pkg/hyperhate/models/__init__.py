"""
Models package for hyperhate.
Contains the dataclass records passed between services.
"""

from hyperhate.models.example import (
    AugmentationSpec,
    Dataset,
    Example,
    GENERATED,
    GOLD,
    HATE,
    NON_HATE,
    SplitDataset,
)
from hyperhate.models.history import EpochRecord, TrainHistory
from hyperhate.models.params import ParamCount, ParamReport
from hyperhate.models.report import ComparisonRow, EvalReport, ExperimentRow, ExperimentSpec
from hyperhate.models.run_config import MODEL_KINDS, RunConfig, TrainConfig
