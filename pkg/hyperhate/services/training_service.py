"""
Supervised training: mini-batch Adam on binary cross-entropy with early
stopping on validation loss and best-epoch restore.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from hyperhate.adapters.base import ClassifierAdapterFactory, DefaultClassifierAdapterFactory
from hyperhate.autodiff import ops
from hyperhate.autodiff.optim import Adam
from hyperhate.autodiff.tensor import Tape, constant
from hyperhate.errors import DegenerateDataError, NumericalError
from hyperhate.interfaces.base import ClassifierInterface
from hyperhate.models.example import Dataset
from hyperhate.models.history import EpochRecord, TrainHistory
from hyperhate.models.run_config import TrainConfig
from hyperhate.services.data_service import stratified_split
from hyperhate.services.evaluation_service import hate_metrics
from hyperhate.services.prediction_service import predict_proba

logger = logging.getLogger(__name__)

CONTINUE = "continue"
STOP = "stop"

bce_loss = ops.bce_loss


@dataclass
class SeedStreams:
    """Independent generators for initialisation, shuffling and dropout."""
    init: np.random.Generator
    shuffle: np.random.Generator
    dropout: np.random.Generator


def seed_streams(seed: int) -> SeedStreams:
    init, shuffle, dropout = (np.random.default_rng(s)
                              for s in np.random.SeedSequence(seed).spawn(3))
    return SeedStreams(init=init, shuffle=shuffle, dropout=dropout)


def early_stop_check(history: Union[TrainHistory, Sequence[float]], patience: int) -> str:
    """
    "stop" iff the last ``patience`` validation losses are all >= the best
    loss recorded before them; a tie counts as no improvement.
    """
    losses = history.val_losses if isinstance(history, TrainHistory) else list(history)
    if not losses:
        raise ValueError("early stopping needs at least one recorded epoch")
    if patience < 1:
        raise ValueError(f"patience must be >= 1, got {patience}")
    best = losses.index(min(losses))
    return STOP if len(losses) - 1 - best >= patience else CONTINUE


def loss_value(probabilities: np.ndarray, labels: np.ndarray) -> float:
    """BCE of already computed probabilities, without recording anything."""
    return float(bce_loss(constant(probabilities), labels).value)


@dataclass
class TrainResult:
    model: ClassifierInterface
    history: TrainHistory
    train_set: Dataset
    validation_set: Dataset


class TrainingService:
    """
    Service building and training classifiers reproducibly from one seed.
    """

    def __init__(self, factory: Optional[ClassifierAdapterFactory] = None):
        self.factory = factory or DefaultClassifierAdapterFactory()

    def build_model(self, config: TrainConfig,
                    architecture: Optional[Dict[str, Any]] = None) -> ClassifierInterface:
        """Create a model of ``config.model_kind`` from the run's init stream."""
        return self.factory.create_adapter(config.model_kind, seed_streams(config.seed).init,
                                           architecture)

    def train(self, model: ClassifierInterface, dataset: Dataset,
              config: TrainConfig) -> TrainResult:
        """
        Train ``model`` in place on ``dataset``.

        A stratified validation share is carved from ``dataset``; batches are
        reshuffled every epoch; training stops once validation loss has not
        improved for ``config.patience`` epochs and the best epoch's
        parameters are restored.

        Raises:
            DegenerateDataError: If a class has fewer than two examples
            NumericalError: If the loss or a gradient becomes non-finite
        """
        counts = dataset.class_counts()
        if min(counts.values()) < 2:
            raise DegenerateDataError(
                f"training needs at least 2 examples of each class, got {counts} in {dataset.name}")
        streams = seed_streams(config.seed)
        split = stratified_split(dataset, 1.0 - config.validation_fraction, config.seed)
        train_set, val_set = split.train, split.test

        model.prepare(train_set.texts)
        x_train, y_train = model.encode(train_set.texts), train_set.labels
        x_val, y_val = model.encode(val_set.texts), val_set.labels
        params = model.parameters()
        optimizer = Adam(params, lr=config.lr)

        history = TrainHistory()
        best_state: Optional[Dict[str, np.ndarray]] = None
        best_loss = np.inf
        logger.info(f"Training {model.kind} on {len(train_set)} examples "
                    f"(validation {len(val_set)}), seed {config.seed}")

        for epoch in range(1, config.max_epochs + 1):
            order = streams.shuffle.permutation(len(train_set))
            for start in range(0, len(order), config.batch_size):
                batch = order[start:start + config.batch_size]
                optimizer.zero_grad()
                with Tape() as tape:
                    probs = model.forward(x_train[batch], ops.TRAIN, streams.dropout)
                    loss = bce_loss(probs, y_train[batch])
                if not np.isfinite(loss.value):
                    message = f"non-finite training loss at epoch {epoch}, batch offset {start}"
                    logger.error(message)
                    raise NumericalError(message)
                tape.backward(loss)
                optimizer.step()

            # both losses are measured in inference mode with the epoch-end parameters
            train_loss = loss_value(predict_proba(model, x_train), y_train)
            val_probs = predict_proba(model, x_val)
            val_loss = loss_value(val_probs, y_val)
            val_f1 = hate_metrics(val_probs, y_val).f1
            history.append(EpochRecord(epoch=epoch, train_loss=train_loss,
                                       val_loss=val_loss, val_f1=val_f1))
            logger.info(f"Epoch {epoch}: train loss {train_loss:.6f}, "
                        f"val loss {val_loss:.6f}, val F1 {val_f1:.4f}")
            if val_loss < best_loss:
                best_loss = val_loss
                best_state = {name: p.value.copy() for name, p in params.items()}
            if early_stop_check(history, config.patience) == STOP:
                history.stopped_early = True
                logger.info(f"Early stop after epoch {epoch}; best epoch "
                            f"{history.best_epoch + 1} (val loss {best_loss:.6f})")
                break

        if best_state is not None:
            for name, value in best_state.items():
                params[name].value = value
        return TrainResult(model=model, history=history, train_set=train_set,
                           validation_set=val_set)
