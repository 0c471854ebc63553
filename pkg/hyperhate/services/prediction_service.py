"""
Deterministic inference over frozen models.
"""

import copy
import logging
from typing import List, Sequence, Tuple

import numpy as np

from hyperhate.autodiff import ops
from hyperhate.interfaces.base import ClassifierInterface
from hyperhate.models.example import Dataset
from hyperhate.models.report import EvalReport
from hyperhate.services.evaluation_service import hate_metrics

logger = logging.getLogger(__name__)

PRECISIONS = {"double": np.float64, "single": np.float32}

INFER_BATCH = 256


def predict_proba(model: ClassifierInterface, inputs: np.ndarray,
                  batch_size: int = INFER_BATCH) -> np.ndarray:
    """Hate probabilities for an encoded batch, dropout off, nothing recorded."""
    inputs = np.asarray(inputs)
    if len(inputs) == 0:
        return np.zeros(0)
    chunks = [model.forward(inputs[start:start + batch_size], ops.INFER).value
              for start in range(0, len(inputs), batch_size)]
    return np.concatenate(chunks)


def with_precision(model: ClassifierInterface, precision: str = "double") -> ClassifierInterface:
    """
    Return ``model`` itself for double precision, or a frozen copy whose
    parameters are cast to float32 for single precision.
    """
    try:
        dtype = PRECISIONS[precision]
    except KeyError:
        raise ValueError(f"precision must be one of {sorted(PRECISIONS)}, got {precision!r}")
    if dtype is np.float64:
        return model
    frozen = copy.deepcopy(model)
    for param in frozen.parameters().values():
        param.value = param.value.astype(dtype)
        param.grad = np.zeros_like(param.value)
        param.requires_grad = False
    return frozen


def predict_texts(model: ClassifierInterface, texts: Sequence[str], threshold: float = 0.5,
                  precision: str = "double") -> List[Tuple[float, int]]:
    """
    (probability, label) per text, in input order; label is p >= threshold.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    runner = with_precision(model, precision)
    probs = predict_proba(runner, runner.encode(list(texts)))
    return [(float(p), int(p >= threshold)) for p in probs]


def evaluate_model(model: ClassifierInterface, dataset: Dataset, threshold: float = 0.5,
                   augmentation: int = 0, precision: str = "double") -> EvalReport:
    """Hate-class report of ``model`` on every example of ``dataset``."""
    runner = with_precision(model, precision)
    probs = predict_proba(runner, runner.encode(dataset.texts))
    report = hate_metrics(probs, dataset.labels, threshold, dataset=dataset.name,
                          model=model.kind, augmentation=augmentation)
    logger.info(f"{model.kind} on {dataset.name}: P={report.precision:.4f} "
                f"R={report.recall:.4f} F1={report.f1:.4f}")
    return report
