"""
Tests for hate-class metrics, curve files and comparison tables.
"""

import numpy as np
import pytest

from hyperhate.errors import IncompatibleCheckpointError, InvalidLabelError, MetricsError, SchemaError
from hyperhate.models.report import ExperimentRow
from hyperhate.services.evaluation_service import (
    comparison_table,
    emit_comparison,
    emit_curves,
    f1_score,
    hate_metrics,
    load_curves,
)


def row(model="static", source="DV", target="DV", n=0, seed=0, f1=0.5):
    return ExperimentRow(model=model, source=source, target=target, n=n, seed=seed,
                         precision=f1, recall=f1, f1=f1, tp=1, fp=1, fn=1, tn=1)


def brute_force(predictions, golds):
    tp = fp = fn = 0
    for p, y in zip(predictions, golds):
        hate = p >= 0.5
        if hate and y == 1:
            tp += 1
        elif hate:
            fp += 1
        elif y == 1:
            fn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


# =============================================================================
# Metrics
# =============================================================================

class TestHateMetrics:

    def test_hand_example(self):
        # TP 2, FP 1, FN 2
        report = hate_metrics([0.9, 0.8, 0.7, 0.1, 0.2, 0.3], [1, 1, 0, 1, 1, 0])
        assert (report.tp, report.fp, report.fn, report.tn) == (2, 1, 2, 1)
        assert report.precision == pytest.approx(2 / 3)
        assert report.recall == pytest.approx(0.5)
        assert report.f1 == pytest.approx(0.5714, abs=1e-4)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            p = rng.random(1000)
            y = rng.integers(0, 2, size=1000)
            report = hate_metrics(p, y)
            expected = brute_force(p, y)
            assert (report.precision, report.recall, report.f1) == pytest.approx(expected)
            assert report.total == 1000

    def test_threshold_is_inclusive(self):
        assert hate_metrics([0.5], [1]).tp == 1
        assert hate_metrics([0.4999], [1]).fn == 1

    def test_no_positive_predictions(self):
        report = hate_metrics([0.1, 0.2], [1, 0])
        assert (report.precision, report.recall, report.f1) == (0.0, 0.0, 0.0)

    def test_no_hate_in_gold(self):
        report = hate_metrics([0.9, 0.1], [0, 0])
        assert report.recall == 0.0
        assert report.f1 == 0.0

    def test_empty(self):
        report = hate_metrics([], [])
        assert report.f1 == 0.0
        assert report.total == 0

    def test_length_mismatch(self):
        with pytest.raises(MetricsError):
            hate_metrics([0.1, 0.2], [1])

    def test_bad_gold_label(self):
        with pytest.raises(InvalidLabelError):
            hate_metrics([0.1, 0.2], [1, 2])

    @pytest.mark.parametrize("threshold", [0.0, 1.0])
    def test_threshold_range(self, threshold):
        with pytest.raises(MetricsError):
            hate_metrics([0.1], [1], threshold=threshold)

    def test_f1_bounded_by_precision_and_recall(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            report = hate_metrics(rng.random(50), rng.integers(0, 2, size=50))
            assert min(report.precision, report.recall) - 1e-12 <= report.f1
            assert report.f1 <= max(report.precision, report.recall) + 1e-12

    def test_f1_zero_denominator(self):
        assert f1_score(0.0, 0.0) == 0.0


# =============================================================================
# Curve files
# =============================================================================

class TestCurves:

    @pytest.fixture
    def rows(self):
        return [row(n=1000, f1=0.7), row(model="dynamic", f1=0.4), row(n=0, f1=0.6),
                row(seed=1, f1=0.65)]

    def test_sorted_output(self, tmp_path, rows):
        path = emit_curves(rows, str(tmp_path / "curves.tsv"))
        lines = open(path, encoding="utf-8").read().splitlines()
        assert lines[0] == "#version=1"
        assert lines[1].split("\t")[:5] == ["model", "source", "target", "n", "seed"]
        keys = [tuple(line.split("\t")[:5]) for line in lines[2:]]
        assert keys == [("dynamic", "DV", "DV", "0", "0"), ("static", "DV", "DV", "0", "0"),
                        ("static", "DV", "DV", "0", "1"), ("static", "DV", "DV", "1000", "0")]

    def test_byte_identical(self, tmp_path, rows):
        a = emit_curves(rows, str(tmp_path / "a.tsv"))
        b = emit_curves(list(reversed(rows)), str(tmp_path / "b.tsv"))
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_load_round_trip(self, tmp_path, rows):
        path = emit_curves(rows, str(tmp_path / "curves.tsv"))
        loaded = load_curves(path)
        assert [r.sort_key for r in loaded] == sorted(r.sort_key for r in rows)
        assert loaded[-1].f1 == pytest.approx(0.7)

    def test_newer_version_rejected(self, tmp_path, rows):
        path = emit_curves(rows, str(tmp_path / "curves.tsv"))
        text = open(path, encoding="utf-8").read().replace("#version=1", "#version=2", 1)
        open(path, "w", encoding="utf-8").write(text)
        with pytest.raises(IncompatibleCheckpointError):
            load_curves(path)

    def test_missing_version_line(self, tmp_path):
        path = tmp_path / "curves.tsv"
        path.write_text("model\tsource\n", encoding="utf-8")
        with pytest.raises(SchemaError):
            load_curves(str(path))

    def test_no_rows(self, tmp_path):
        with pytest.raises(ValueError):
            emit_curves([], str(tmp_path / "curves.tsv"))


# =============================================================================
# Comparison
# =============================================================================

class TestComparison:

    def test_baseline_against_largest_n(self):
        rows = [row(n=0, f1=0.5), row(n=1000, f1=0.55), row(n=2000, f1=0.6)]
        table = comparison_table(rows)
        assert [r.metric for r in table] == ["precision", "recall", "f1"]
        f1 = table[-1]
        assert (f1.baseline, f1.augmented, f1.augmented_n) == (0.5, 0.6, 2000)
        assert f1.change_percent == pytest.approx(20.0)

    def test_groups_without_baseline_are_skipped(self):
        assert comparison_table([row(n=1000), row(n=2000)]) == []
        assert comparison_table([row(n=0)]) == []

    def test_zero_baseline_has_no_change(self):
        table = comparison_table([row(n=0, f1=0.0), row(n=10, f1=0.3)])
        assert table[-1].change_percent is None

    def test_per_seed_groups(self):
        rows = [row(n=0, seed=s) for s in (0, 1)] + [row(n=10, seed=s) for s in (0, 1)]
        assert {r.seed for r in comparison_table(rows)} == {0, 1}

    def test_emit(self, tmp_path):
        table = comparison_table([row(n=0, f1=0.5), row(n=10, f1=0.6)])
        path = emit_comparison(table, str(tmp_path / "comparison.tsv"))
        lines = open(path, encoding="utf-8").read().splitlines()
        assert lines[0] == "#version=1"
        assert lines[1].endswith("change_percent")
        assert len(lines) == 5
