"""
Base adapter factory for classifier implementations.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from hyperhate.adapters.charcnn import BackboneConfig, CharBackbone, CharClassifier, OwnedConvWeights
from hyperhate.adapters.cnngru import CnnGruClassifier, CnnGruConfig
from hyperhate.adapters.hypernet import AuxConfig, DynamicAuxiliary, StaticAuxiliary
from hyperhate.interfaces.base import ClassifierInterface

logger = logging.getLogger(__name__)

#: builder(rng, architecture) -> classifier
ClassifierBuilder = Callable[[np.random.Generator, Dict[str, Any]], ClassifierInterface]


class ClassifierAdapterFactory(ABC):
    """
    Abstract factory for creating classifiers by model kind.
    """

    @abstractmethod
    def create_adapter(self, kind: str, rng: np.random.Generator,
                       architecture: Optional[Dict[str, Any]] = None) -> ClassifierInterface:
        """
        Create a freshly initialised classifier of the specified kind.

        Args:
            kind: Model kind (e.g., "static", "cnngru")
            rng: Generator used for parameter initialisation
            architecture: Optional settings as returned by ``ClassifierInterface.config``;
                defaults are used for anything missing

        Returns:
            An implementation of ClassifierInterface
        """
        pass

    @abstractmethod
    def list_available_adapters(self) -> List[str]:
        """
        List all available model kinds.

        Returns:
            List of model kind names
        """
        pass


def _char_parts(rng: np.random.Generator, architecture: Dict[str, Any]):
    backbone_cfg = BackboneConfig.from_dict(architecture.get("backbone", {}))
    backbone = CharBackbone(backbone_cfg, rng)
    return backbone_cfg, backbone


def build_plain(rng: np.random.Generator, architecture: Dict[str, Any]) -> ClassifierInterface:
    backbone_cfg, backbone = _char_parts(rng, architecture)
    return CharClassifier("plain", backbone, OwnedConvWeights(backbone_cfg, rng))


def _aux_config(backbone_cfg: BackboneConfig, architecture: Dict[str, Any]) -> AuxConfig:
    data = {"c_in": backbone_cfg.channels, "kernel": backbone_cfg.kernel,
            "c_out": backbone_cfg.channels}
    data.update(architecture.get("aux", {}))
    return AuxConfig.from_dict(data)


def build_static(rng: np.random.Generator, architecture: Dict[str, Any]) -> ClassifierInterface:
    backbone_cfg, backbone = _char_parts(rng, architecture)
    aux = StaticAuxiliary(_aux_config(backbone_cfg, architecture), rng)
    return CharClassifier("static", backbone, aux)


def build_dynamic(rng: np.random.Generator, architecture: Dict[str, Any]) -> ClassifierInterface:
    backbone_cfg, backbone = _char_parts(rng, architecture)
    aux = DynamicAuxiliary(_aux_config(backbone_cfg, architecture), rng)
    return CharClassifier("dynamic", backbone, aux)


def build_cnngru(rng: np.random.Generator, architecture: Dict[str, Any]) -> ClassifierInterface:
    return CnnGruClassifier(CnnGruConfig.from_dict(architecture.get("cnngru", {})), rng)


class DefaultClassifierAdapterFactory(ClassifierAdapterFactory):
    """
    Default implementation of ClassifierAdapterFactory.

    The four built-in kinds are registered on construction; further kinds
    can be added with ``register_adapter``.
    """

    def __init__(self):
        self._adapters: Dict[str, ClassifierBuilder] = {}
        self.register_adapter("plain", build_plain)
        self.register_adapter("static", build_static)
        self.register_adapter("dynamic", build_dynamic)
        self.register_adapter("cnngru", build_cnngru)

    def register_adapter(self, name: str, builder: ClassifierBuilder) -> None:
        """
        Register a builder for a given model kind.

        Args:
            name: Model kind to register the builder under
            builder: Callable taking (rng, architecture) and returning a classifier
        """
        self._adapters[name] = builder

    def create_adapter(self, kind, rng, architecture=None) -> ClassifierInterface:
        """
        Create a classifier of the specified kind.

        Raises:
            ValueError: If kind is not registered
        """
        try:
            builder = self._adapters[kind]
        except KeyError:
            raise ValueError(
                f"Model kind {kind!r} is not supported; available: {self.list_available_adapters()}")
        model = builder(rng, architecture or {})
        logger.debug(f"Created {kind} classifier")
        return model

    def list_available_adapters(self) -> List[str]:
        return list(self._adapters)
