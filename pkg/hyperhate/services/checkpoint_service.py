"""
Versioned, self-describing model checkpoints.

A checkpoint is a JSON document holding the format version, model kind,
architecture settings, the canonical alphabet fingerprint, any extra model
state (the CNN-GRU vocabulary) and every named tensor with its shape and
row-major values. Keys are sorted so equal models give equal bytes.
"""

import json
import logging
from typing import Any, Dict, Optional

import numpy as np

from hyperhate.adapters.base import ClassifierAdapterFactory, DefaultClassifierAdapterFactory
from hyperhate.errors import DimensionError, IncompatibleCheckpointError
from hyperhate.interfaces.base import ClassifierInterface
from hyperhate.text.alphabet import build_alphabet

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1


def checkpoint_dict(model: ClassifierInterface,
                    metadata: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    tensors = [
        {"name": name, "shape": list(param.shape),
         "values": np.asarray(param.value, dtype=np.float64).reshape(-1).tolist()}
        for name, param in model.parameters().items()
    ]
    return {
        "version": CHECKPOINT_VERSION,
        "kind": model.kind,
        "architecture": model.config(),
        "alphabet": build_alphabet().fingerprint,
        "extra": model.extra_state(),
        "metadata": metadata or {},
        "tensors": tensors,
    }


def save_checkpoint(model: ClassifierInterface, path: str,
                    metadata: Optional[Dict[str, Any]] = None) -> str:
    """Write ``model`` to ``path``; ``metadata`` is stored verbatim (e.g. the train config)."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(checkpoint_dict(model, metadata), f, sort_keys=True)
        f.write("\n")
    logger.info(f"Checkpoint written to {path}")
    return path


def restore_model(data: Dict[str, Any],
                  factory: Optional[ClassifierAdapterFactory] = None) -> ClassifierInterface:
    """
    Rebuild a model from a checkpoint dictionary.

    Raises:
        IncompatibleCheckpointError: On a newer version or a different alphabet ordering
        DimensionError: If a stored tensor does not fit the rebuilt model
    """
    version = int(data.get("version", 0))
    if version > CHECKPOINT_VERSION or version < 1:
        raise IncompatibleCheckpointError(
            f"checkpoint version {version} is not readable (supported: 1..{CHECKPOINT_VERSION})")
    expected = build_alphabet().fingerprint
    if data.get("alphabet") != expected:
        raise IncompatibleCheckpointError(
            f"checkpoint alphabet fingerprint {str(data.get('alphabet'))[:12]}... "
            f"differs from the built-in ordering {expected[:12]}...")

    factory = factory or DefaultClassifierAdapterFactory()
    # Values are overwritten below; the generator only fixes the allocation order.
    model = factory.create_adapter(data["kind"], np.random.default_rng(0), data.get("architecture"))
    if data.get("extra"):
        model.load_extra_state(data["extra"])
    params = model.parameters()
    stored = {t["name"]: t for t in data.get("tensors", [])}
    missing = sorted(set(params) - set(stored))
    unexpected = sorted(set(stored) - set(params))
    if missing or unexpected:
        raise IncompatibleCheckpointError(
            f"checkpoint tensors do not match a {data['kind']} model: "
            f"missing {missing}, unexpected {unexpected}")
    for name, param in params.items():
        shape = tuple(stored[name]["shape"])
        if shape != param.shape:
            raise DimensionError(f"tensor {name}: checkpoint shape {shape}, model shape {param.shape}")
        param.value = np.asarray(stored[name]["values"], dtype=np.float64).reshape(shape)
        param.zero_grad()
    return model


def load_checkpoint(path: str,
                    factory: Optional[ClassifierAdapterFactory] = None) -> ClassifierInterface:
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    model = restore_model(data, factory)
    logger.info(f"Loaded {model.kind} checkpoint from {path}")
    return model
