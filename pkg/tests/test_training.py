"""
Tests for the training loop, early stopping and seeded reproducibility.
"""

import json

import numpy as np
import pytest

from hyperhate.adapters.base import DefaultClassifierAdapterFactory
from hyperhate.errors import DegenerateDataError
from hyperhate.models.example import HATE, NON_HATE, Dataset, Example
from hyperhate.models.history import EpochRecord, TrainHistory
from hyperhate.models.run_config import TrainConfig
from hyperhate.services.config_service import ConfigService
from hyperhate.services.data_service import generate_toy_dataset
from hyperhate.services.evaluation_service import hate_metrics
from hyperhate.services.prediction_service import evaluate_model, predict_proba
from hyperhate.services.training_service import (
    CONTINUE,
    STOP,
    TrainingService,
    early_stop_check,
    loss_value,
    seed_streams,
)


@pytest.fixture
def small_service():
    return TrainingService(DefaultClassifierAdapterFactory())


def train_small(service, architectures, dataset, kind="static", **overrides):
    settings = dict(model_kind=kind, batch_size=8, max_epochs=4, patience=3, seed=0)
    settings.update(overrides)
    config = TrainConfig(**settings)
    model = service.build_model(config, architectures[kind])
    return service.train(model, dataset, config)


class TestEarlyStop:

    def test_improving_continues(self):
        assert early_stop_check([1.0, 0.9, 0.8], 3) == CONTINUE

    def test_worsening_stops(self):
        assert early_stop_check([0.8, 0.9, 1.0, 1.1], 3) == STOP

    def test_plateau_counts_as_no_improvement(self):
        assert early_stop_check([0.5, 0.5, 0.5, 0.5], 3) == STOP
        assert early_stop_check([0.5, 0.5, 0.5], 3) == CONTINUE

    def test_patience_one_stops_after_two_evaluations(self):
        assert early_stop_check([1.0], 1) == CONTINUE
        assert early_stop_check([1.0, 1.1], 1) == STOP

    def test_accepts_history(self):
        history = TrainHistory()
        for epoch, loss in enumerate([0.7, 0.8], start=1):
            history.append(EpochRecord(epoch=epoch, train_loss=0.0, val_loss=loss, val_f1=0.0))
        assert early_stop_check(history, 1) == STOP
        assert history.best_epoch == 0

    def test_empty_history(self):
        with pytest.raises(ValueError):
            early_stop_check([], 3)


class TestTrainConfig:

    @pytest.mark.parametrize("field, value", [
        ("validation_fraction", 0.5), ("validation_fraction", 0.0),
        ("patience", 0), ("model_kind", "bert"), ("lr", 0.0),
    ])
    def test_invalid(self, field, value):
        with pytest.raises(ValueError):
            TrainConfig(**{field: value})

    def test_defaults(self):
        config = TrainConfig()
        assert (config.batch_size, config.lr, config.patience, config.validation_fraction) == \
            (32, 1e-3, 3, 0.1)


def test_seed_streams_are_independent_and_reproducible():
    a, b = seed_streams(7), seed_streams(7)
    draws = [s.random(4) for s in (a.init, a.shuffle, a.dropout)]
    np.testing.assert_array_equal(draws[0], b.init.random(4))
    assert not np.array_equal(draws[0], draws[1])
    assert not np.array_equal(draws[1], draws[2])


def test_loss_value_matches_recorded_loss():
    p = np.array([0.9, 0.2])
    assert loss_value(p, np.array([1, 0])) == pytest.approx(0.16425, abs=1e-5)
    assert loss_value(np.full(3, 0.5), np.array([1, 0, 1])) == pytest.approx(0.693147, abs=1e-6)


class TestTrain:

    def test_single_class_rejected(self, small_service, small_architectures):
        data = Dataset(name="one", examples=tuple(Example(f"t{i}", HATE) for i in range(10)))
        with pytest.raises(DegenerateDataError):
            train_small(small_service, small_architectures, data)

    def test_history_recorded(self, small_service, small_architectures, short_dataset):
        result = train_small(small_service, small_architectures, short_dataset, max_epochs=3,
                             patience=5)
        assert [e.epoch for e in result.history.epochs] == [1, 2, 3]
        assert all(np.isfinite(e.train_loss) and np.isfinite(e.val_loss)
                   for e in result.history.epochs)
        lines = result.history.to_lines().splitlines()
        assert len(lines) == 3 and '"val_f1"' in lines[0]
        assert [EpochRecord.from_dict(json.loads(line)) for line in lines] == result.history.epochs

    def test_validation_is_stratified_and_disjoint(self, small_service, small_architectures,
                                                   short_dataset):
        result = train_small(small_service, small_architectures, short_dataset, max_epochs=1)
        assert result.validation_set.class_counts() == {NON_HATE: 1, HATE: 1}
        assert len(result.train_set) + len(result.validation_set) == len(short_dataset)
        assert not set(result.train_set.examples) & set(result.validation_set.examples)

    @pytest.mark.parametrize("kind", ["plain", "static", "dynamic", "cnngru"])
    def test_same_seed_same_curves(self, small_service, small_architectures, short_dataset, kind):
        first = train_small(small_service, small_architectures, short_dataset, kind=kind)
        second = train_small(small_service, small_architectures, short_dataset, kind=kind)
        assert first.history.to_dict() == second.history.to_dict()
        for name, param in first.model.parameters().items():
            np.testing.assert_array_equal(param.value, second.model.parameters()[name].value)

    def test_different_seed_different_curves(self, small_service, small_architectures,
                                             short_dataset):
        first = train_small(small_service, small_architectures, short_dataset, seed=0)
        second = train_small(small_service, small_architectures, short_dataset, seed=1)
        assert first.history.train_losses != second.history.train_losses

    def test_restored_parameters_reproduce_best_loss(self, small_service, small_architectures,
                                                     short_dataset):
        result = train_small(small_service, small_architectures, short_dataset, max_epochs=6,
                             patience=2, lr=0.05)
        model, val = result.model, result.validation_set
        reevaluated = loss_value(predict_proba(model, model.encode(val.texts)), val.labels)
        assert reevaluated == pytest.approx(result.history.best_val_loss, rel=1e-12)
        train = result.train_set
        best = result.history.epochs[result.history.best_epoch]
        reevaluated = loss_value(predict_proba(model, model.encode(train.texts)), train.labels)
        assert reevaluated == pytest.approx(best.train_loss, rel=1e-12)

    def test_train_loss_decreases(self, small_service, small_architectures,
                                  short_dataset):
        result = train_small(small_service, small_architectures, short_dataset, max_epochs=5,
                             patience=10, lr=1e-2)
        losses = result.history.train_losses
        assert min(losses[1:]) < losses[0]


@pytest.mark.slow
@pytest.mark.parametrize("kind", ["static", "dynamic", "plain", "cnngru"])
def test_overfit_toy_set(kind):
    """Every model kind lowers its train loss each early epoch and fits the noise-free toy set."""
    data = generate_toy_dataset(64, noise=0.0, seed=11)
    config = TrainConfig(model_kind=kind, max_epochs=200, patience=200, seed=0)
    service = TrainingService()
    settings = ConfigService().get_adapter_config(kind)
    if kind == "cnngru":
        # toy noise words are mostly unique; keep them all
        settings["cnngru"]["min_count"] = 1
    model = service.build_model(config, settings)
    result = service.train(model, data, config)
    losses = result.history.train_losses[:5]
    assert all(later < earlier for earlier, later in zip(losses, losses[1:])), losses
    report = evaluate_model(model, result.train_set)
    assert report.f1 == 1.0


def test_hate_metrics_used_for_validation_f1(small_service, small_architectures, short_dataset):
    result = train_small(small_service, small_architectures, short_dataset, max_epochs=1)
    model, val = result.model, result.validation_set
    expected = hate_metrics(predict_proba(model, model.encode(val.texts)), val.labels).f1
    assert result.history.epochs[-1].val_f1 == expected
