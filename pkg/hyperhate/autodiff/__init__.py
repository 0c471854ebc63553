"""
Autodiff package: tensors, the recording tape, differentiable ops and Adam.
"""

from hyperhate.autodiff.tensor import Var, Tape, backward, constant, active_tape
from hyperhate.autodiff.optim import Adam, AdamState, adam_step
