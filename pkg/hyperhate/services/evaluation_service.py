"""
Hate-class metrics, curve files and baseline-vs-augmented comparisons.
"""

import logging
from collections import defaultdict
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd
from sklearn.metrics import confusion_matrix

from hyperhate.errors import IncompatibleCheckpointError, InvalidLabelError, MetricsError, SchemaError
from hyperhate.models.report import RESULT_FIELDS, ComparisonRow, EvalReport, ExperimentRow

logger = logging.getLogger(__name__)

CURVES_VERSION = 1
COMPARISON_METRICS = ("precision", "recall", "f1")


def f1_score(precision: float, recall: float) -> float:
    return 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0


def hate_metrics(predictions: Sequence[float], golds: Sequence[int], threshold: float = 0.5,
                 dataset: str = "", model: str = "", augmentation: int = 0) -> EvalReport:
    """
    Precision, recall and F1 of the hate class; predict hate iff p >= threshold.

    Zero denominators give 0 for the affected score.

    Raises:
        MetricsError: If the lengths differ or the threshold is outside (0, 1)
        InvalidLabelError: If a gold label is not 0 or 1
    """
    p = np.asarray(predictions, dtype=np.float64).reshape(-1)
    y = np.asarray(golds).reshape(-1)
    if p.shape != y.shape:
        raise MetricsError(f"{p.size} predictions but {y.size} gold labels")
    if not 0.0 < threshold < 1.0:
        raise MetricsError(f"threshold must be in (0, 1), got {threshold}")
    if y.size and not np.isin(y, (0, 1)).all():
        raise InvalidLabelError(f"gold labels must be 0 or 1, found {y[~np.isin(y, (0, 1))][0]!r}")

    if y.size:
        predicted = (p >= threshold).astype(np.int64)
        tn, fp, fn, tp = (int(c) for c in
                          confusion_matrix(y.astype(np.int64), predicted, labels=[0, 1]).ravel())
    else:
        tn = fp = fn = tp = 0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return EvalReport(precision=precision, recall=recall, f1=f1_score(precision, recall),
                      tp=tp, fp=fp, fn=fn, tn=tn,
                      dataset=dataset, model=model, augmentation=augmentation)


def _rows_frame(rows: Iterable[ExperimentRow]) -> pd.DataFrame:
    ordered = sorted(rows, key=lambda r: r.sort_key)
    return pd.DataFrame([r.to_dict() for r in ordered], columns=list(RESULT_FIELDS))


def emit_curves(rows: Sequence[ExperimentRow], path: str) -> str:
    """
    Write one tab-separated record per (model, pair, n, seed), sorted, under
    a ``#version=`` line and the fixed header. Identical rows give identical bytes.
    """
    if not rows:
        raise ValueError("no experiment rows to emit")
    frame = _rows_frame(rows)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"#version={CURVES_VERSION}\n")
        frame.to_csv(f, sep="\t", index=False, float_format="%.6f", lineterminator="\n")
    logger.info(f"Wrote {len(frame)} curve records to {path}")
    return path


def load_curves(path: str) -> List[ExperimentRow]:
    """
    Read a curve file written by ``emit_curves``.

    Raises:
        IncompatibleCheckpointError: If the file was written by a newer version
        SchemaError: If the version line or a column is missing
    """
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline().strip()
    if not first.startswith("#version="):
        raise SchemaError("missing #version= line", path, 1)
    version = int(first.split("=", 1)[1])
    if version > CURVES_VERSION:
        raise IncompatibleCheckpointError(
            f"{path} has curve format version {version}, this library reads up to {CURVES_VERSION}")
    frame = pd.read_csv(path, sep="\t", skiprows=1, dtype={"model": str, "source": str, "target": str})
    missing = [c for c in RESULT_FIELDS if c not in frame.columns]
    if missing:
        raise SchemaError(f"missing columns {missing}", path, 2)
    return [ExperimentRow.from_dict(record) for record in frame.to_dict(orient="records")]


def comparison_table(rows: Sequence[ExperimentRow]) -> List[ComparisonRow]:
    """
    Per (model, source, target, seed): each metric at n=0 against the largest n.

    Groups without an n=0 row or without any augmented row are left out.
    """
    groups: Dict[Tuple[str, str, str, int], List[ExperimentRow]] = defaultdict(list)
    for row in rows:
        groups[(row.model, row.source, row.target, row.seed)].append(row)
    table = []
    for (model, source, target, seed), members in sorted(groups.items()):
        baseline = next((r for r in members if r.n == 0), None)
        augmented = max(members, key=lambda r: r.n)
        if baseline is None or augmented.n == 0:
            continue
        for metric in COMPARISON_METRICS:
            table.append(ComparisonRow(model=model, source=source, target=target, seed=seed,
                                       metric=metric, baseline=getattr(baseline, metric),
                                       augmented=getattr(augmented, metric),
                                       augmented_n=augmented.n))
    return table


def emit_comparison(table: Sequence[ComparisonRow], path: str) -> str:
    frame = pd.DataFrame([row.to_dict() for row in table],
                         columns=["model", "source", "target", "seed", "metric", "baseline",
                                  "augmented", "augmented_n", "change_percent"])
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"#version={CURVES_VERSION}\n")
        frame.to_csv(f, sep="\t", index=False, float_format="%.6f", lineterminator="\n")
    logger.info(f"Wrote {len(frame)} comparison records to {path}")
    return path
