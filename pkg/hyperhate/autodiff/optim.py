"""
Adam optimizer with bias correction over named Vars.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping

import numpy as np

from hyperhate.autodiff.tensor import Var
from hyperhate.errors import DimensionError, NumericalError

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    """Moment estimates per parameter name, the step counter and hyperparameters."""
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    t: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError(f"learning rate must be positive, got {self.lr}")


def adam_step(params: Mapping[str, Var], grads: Mapping[str, np.ndarray],
              state: AdamState) -> None:
    """
    Apply one Adam update in place.

    Raises NumericalError before touching any parameter if a gradient holds
    NaN or infinity.
    """
    bad = {name: int(np.count_nonzero(~np.isfinite(g))) for name, g in grads.items()
           if not np.all(np.isfinite(g))}
    if bad:
        details = ", ".join(f"{name} ({count} non-finite)" for name, count in sorted(bad.items()))
        logger.error(f"Aborting Adam step {state.t + 1}: {details}")
        raise NumericalError(f"non-finite gradient at step {state.t + 1}: {details}")

    state.t += 1
    bc1 = 1.0 - state.beta1 ** state.t
    bc2 = 1.0 - state.beta2 ** state.t
    step_size = state.lr / bc1

    for name, param in params.items():
        g = grads[name]
        if g.shape != param.shape:
            raise DimensionError(f"gradient {g.shape} does not match parameter {name} {param.shape}")
        if name not in state.m:
            state.m[name] = np.zeros_like(param.value)
            state.v[name] = np.zeros_like(param.value)
        m, v = state.m[name], state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        denom = np.sqrt(v / bc2) + state.epsilon
        param.value = param.value - step_size * m / denom


class Adam:
    """Convenience wrapper holding the parameter dict and its AdamState."""

    def __init__(self, params: Mapping[str, Var], lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, epsilon: float = 1e-8):
        self.params = dict(params)
        self.state = AdamState(lr=lr, beta1=beta1, beta2=beta2, epsilon=epsilon)

    def step(self) -> None:
        adam_step(self.params, {name: p.grad for name, p in self.params.items()}, self.state)

    def zero_grad(self) -> None:
        for param in self.params.values():
            param.zero_grad()
