"""
Compact character-level hate speech classifiers.

HyperHate-Static and HyperHate-Dynamic generate their convolution kernels
with a small auxiliary network; the plain character CNN and the word-level
CNN-GRU serve as baselines.
"""

from typing import Any, Dict, Optional

from hyperhate.adapters.base import ClassifierAdapterFactory, DefaultClassifierAdapterFactory
from hyperhate.interfaces.base import ClassifierInterface
from hyperhate.models.run_config import TrainConfig
from hyperhate.services.config_service import ConfigService
from hyperhate.services.training_service import TrainingService

# Set version
__version__ = '0.1.0'


def create_classifier(
    kind: str = "static",
    seed: int = 0,
    adapter_factory: Optional[ClassifierAdapterFactory] = None,
    config_override: Optional[Dict[str, Any]] = None,
) -> ClassifierInterface:
    """
    Create an untrained classifier with the packaged architecture defaults.

    Args:
        kind: Model kind ("plain", "static", "dynamic" or "cnngru")
        seed: Run seed; initialisation uses its init stream
        adapter_factory: Factory for creating classifiers (optional)
        config_override: Architecture settings merged over the defaults (optional)

    Returns:
        Classifier ready for ``TrainingService.train``
    """
    config_service = ConfigService()
    architecture = config_service.get_adapter_config(kind)
    architecture.update(config_override or {})
    service = TrainingService(adapter_factory or DefaultClassifierAdapterFactory())
    return service.build_model(TrainConfig(model_kind=kind, seed=seed), architecture)
