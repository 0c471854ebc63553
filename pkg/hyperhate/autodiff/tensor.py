"""
Reverse-mode automatic differentiation over dense numpy arrays.

A Var wraps a value array and a gradient array of the same shape. Operations
executed while a Tape is active (``with Tape() as tape:``) are recorded in
order; ``tape.backward(loss)`` replays them in exact reverse recording order.
Outside an active tape, operations only compute values, which is what frozen
inference uses.

The active tape is thread-local, so independent threads can run inference or
separate training sessions without sharing recording state.
"""

import logging
import threading
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from hyperhate.errors import RankError

logger = logging.getLogger(__name__)

DEFAULT_DTYPE = np.float64

_local = threading.local()


class Var:
    """
    A node of the computation: value, gradient slot and tape handle.

    Leaf Vars (parameters, inputs) accumulate gradients across backward passes
    until ``zero_grad`` is called. Vars produced by recorded operations carry
    the index of their record in ``node``.
    """

    __slots__ = ("value", "grad", "node", "requires_grad", "name")

    def __init__(self, value, requires_grad: bool = True, name: Optional[str] = None,
                 dtype=None):
        array = np.asarray(value, dtype=dtype or _infer_dtype(value))
        self.value = array
        self.grad = np.zeros_like(array)
        self.node: Optional[int] = None
        self.requires_grad = requires_grad
        self.name = name

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    @property
    def size(self) -> int:
        return int(self.value.size)

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.value)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Var(shape={self.shape}{label})"


def _infer_dtype(value):
    if isinstance(value, np.ndarray) and value.dtype in (np.float32, np.float64):
        return value.dtype
    return DEFAULT_DTYPE


def constant(value, dtype=None) -> Var:
    """Wrap a value that never receives a gradient."""
    return Var(value, requires_grad=False, dtype=dtype)


BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


@dataclass
class Record:
    """One recorded operation: its inputs, its output and the local backward rule."""
    op: str
    inputs: Tuple[Var, ...]
    output: Var
    backward_fn: BackwardFn


class Tape:
    """
    Ordered list of recorded operations.

    Records are appended in execution order, so every node's inputs precede
    it; backward walks the list from the end.
    """

    def __init__(self):
        self.records: List[Record] = []

    def __enter__(self) -> "Tape":
        stack = _tape_stack()
        stack.append(self)
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        stack = _tape_stack()
        if stack and stack[-1] is self:
            stack.pop()

    def __len__(self) -> int:
        return len(self.records)

    def record(self, op: str, inputs: Sequence[Var], output: Var,
               backward_fn: BackwardFn) -> Var:
        output.node = len(self.records)
        self.records.append(Record(op, tuple(inputs), output, backward_fn))
        return output

    def backward(self, loss: Var) -> None:
        """
        Propagate d(loss)/d(.) to every leaf Var reachable from ``loss``.

        Gradients accumulate into leaf ``grad`` slots; intermediate gradients
        live only for the duration of the call, so repeated calls add the
        same contribution again.
        """
        if loss.size != 1:
            raise RankError(f"backward requires a scalar loss, got shape {loss.shape}")
        if loss.node is None or loss.node >= len(self.records) or \
                self.records[loss.node].output is not loss:
            raise ValueError("loss was not produced on this tape")

        upstream: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.value)}
        for index in range(loss.node, -1, -1):
            record = self.records[index]
            g_out = upstream.pop(id(record.output), None)
            if g_out is None:
                continue
            g_inputs = record.backward_fn(g_out)
            for var, g in zip(record.inputs, g_inputs):
                if g is None or not var.requires_grad:
                    continue
                if var.node is not None and var.node < index and \
                        self.records[var.node].output is var:
                    key = id(var)
                    if key in upstream:
                        upstream[key] = upstream[key] + g
                    else:
                        upstream[key] = g
                else:
                    var.grad = var.grad + g

    def reset(self) -> None:
        self.records.clear()


def _tape_stack() -> List[Tape]:
    stack = getattr(_local, "stack", None)
    if stack is None:
        stack = []
        _local.stack = stack
    return stack


def active_tape() -> Optional[Tape]:
    """Return the innermost tape active on this thread, if any."""
    stack = _tape_stack()
    return stack[-1] if stack else None


def backward(tape: Tape, loss: Var) -> None:
    """Functional spelling of ``tape.backward(loss)``."""
    tape.backward(loss)


def emit(op: str, inputs: Sequence[Var], value: np.ndarray,
         backward_fn: Optional[BackwardFn] = None) -> Var:
    """
    Create the output Var of an operation and record it on the active tape.

    Nothing is recorded when no tape is active or when no input needs a
    gradient.
    """
    out = Var(value, requires_grad=any(v.requires_grad for v in inputs),
              dtype=value.dtype if value.dtype in (np.float32, np.float64) else None)
    tape = active_tape()
    if tape is not None and out.requires_grad and backward_fn is not None:
        tape.record(op, inputs, out, backward_fn)
    return out
