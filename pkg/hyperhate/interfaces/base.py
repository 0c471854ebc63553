"""
Base interfaces for classifiers and convolution weight sources.

These interfaces define the contract between the training / evaluation
services and the individual network implementations.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from hyperhate.autodiff.tensor import Var
from hyperhate.models.params import ParamCount, ParamReport


class ConvWeightSource(ABC):
    """
    Supplier of the kernel stack for each convolutional layer of the
    character backbone.

    An owned source holds the kernels as parameters; an auxiliary source
    generates them, possibly from the layer's input sequence.
    """

    #: "owned" or "generated"
    source: str = "owned"

    @abstractmethod
    def conv_weight(self, layer: int, layer_input: Var, mode: str,
                    rng: Optional[np.random.Generator] = None) -> Var:
        """
        Return the kernels for conv layer ``layer`` (1 or 2).

        Args:
            layer: 1-based conv layer number
            layer_input: the [B, L_j, C_in] sequence entering the layer
            mode: "train" or "infer"
            rng: dropout generator (train mode only)

        Returns:
            A [C_in, k, C_out] Var shared by the batch, or [B, C_in, k, C_out]
            with one kernel stack per example
        """
        pass

    @abstractmethod
    def parameters(self) -> Dict[str, Var]:
        """
        Learnable tensors of this source, keyed by stable names.
        """
        pass

    @abstractmethod
    def param_rows(self) -> List[ParamCount]:
        """
        Parameter accounting rows contributed by this source.
        """
        pass


class ClassifierInterface(ABC):
    """
    Interface for a binary hate classifier.

    Implementations own their parameters, turn raw texts into index arrays
    and compute hate probabilities.
    """

    #: Registry name: "plain", "static", "dynamic" or "cnngru"
    kind: str = ""

    @abstractmethod
    def parameters(self) -> Dict[str, Var]:
        """
        Get all learnable tensors.

        Returns:
            Ordered dictionary of name to Var
        """
        pass

    @abstractmethod
    def encode(self, texts: Sequence[str]) -> np.ndarray:
        """
        Encode raw texts into the integer batch consumed by ``forward``.

        Args:
            texts: Raw input texts

        Returns:
            Integer array with a leading batch axis
        """
        pass

    @abstractmethod
    def forward(self, inputs: np.ndarray, mode: str = "infer",
                rng: Optional[np.random.Generator] = None) -> Var:
        """
        Compute hate probabilities.

        Args:
            inputs: Encoded batch from ``encode``
            mode: "train" enables dropout, "infer" is deterministic
            rng: Generator for dropout masks in train mode

        Returns:
            Var of shape [B] with values in (0, 1)
        """
        pass

    @abstractmethod
    def param_report(self) -> ParamReport:
        """
        Get per-layer parameter counts and the total.

        Returns:
            ParamReport for this model
        """
        pass

    def prepare(self, texts: Sequence[str]) -> None:
        """
        Fit any text preprocessing on training texts before training.

        Args:
            texts: Training-split texts only
        """
        return None

    def config(self) -> Dict[str, Any]:
        """
        Architecture settings needed to rebuild the model.
        """
        return {}

    def extra_state(self) -> Dict[str, Any]:
        """
        Non-tensor state saved with the checkpoint (e.g. a vocabulary).
        """
        return {}

    def load_extra_state(self, state: Dict[str, Any]) -> None:
        """
        Restore state produced by ``extra_state``.
        """
        return None
