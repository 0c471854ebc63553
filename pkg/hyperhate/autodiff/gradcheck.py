"""
Central finite-difference gradient checking.
"""

from typing import Callable, Dict, Sequence

import numpy as np

from hyperhate.autodiff.tensor import Tape, Var


def numerical_gradient(fn: Callable[[], Var], var: Var, h: float = 1e-5) -> np.ndarray:
    """d fn() / d var by central differences, perturbing ``var.value`` in place."""
    var.value = np.ascontiguousarray(var.value)
    grad = np.zeros_like(var.value)
    flat = var.value.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        plus = float(fn().value)
        flat[i] = original - h
        minus = float(fn().value)
        flat[i] = original
        out[i] = (plus - minus) / (2.0 * h)
    return grad


def analytic_gradients(fn: Callable[[], Var], variables: Sequence[Var]) -> Dict[int, np.ndarray]:
    for var in variables:
        var.zero_grad()
    with Tape() as tape:
        loss = fn()
    tape.backward(loss)
    return {id(var): var.grad.copy() for var in variables}


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-8) -> float:
    """Max elementwise |a - n| / max(|a|, |n|, floor)."""
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / scale)) if analytic.size else 0.0


def gradcheck(fn: Callable[[], Var], variables: Sequence[Var], h: float = 1e-5,
              tolerance: float = 1e-4, atol: float = 1e-7) -> float:
    """
    Compare tape gradients of the scalar ``fn()`` against central differences.

    Elements whose analytic and numeric gradients are both below ``atol``
    are treated as agreeing. Returns the worst relative error and raises
    AssertionError when it exceeds ``tolerance``.
    """
    analytic = analytic_gradients(fn, variables)
    worst = 0.0
    for var in variables:
        numeric = numerical_gradient(fn, var, h)
        a = analytic[id(var)]
        significant = np.maximum(np.abs(a), np.abs(numeric)) > atol
        if significant.any():
            worst = max(worst, relative_error(a[significant], numeric[significant]))
    if worst > tolerance:
        raise AssertionError(f"gradient check failed: max relative error {worst:.3e} > {tolerance:.0e}")
    return worst


def spot_check(fn: Callable[[], Var], variables: Sequence[Var], rng: np.random.Generator,
               samples: int = 2, h: float = 1e-5, tolerance: float = 1e-4,
               atol: float = 1e-7, kink_tolerance: float = 1e-2) -> float:
    """
    Check tape gradients at ``samples`` random coordinates of each variable.

    A coordinate whose one-sided slopes disagree sits on a ReLU or max-pool
    kink within ``h``; it passes when the analytic value matches either
    one-sided slope to ``kink_tolerance``. Returns the worst relative error.
    """
    analytic = analytic_gradients(fn, variables)
    base = float(fn().value)
    worst = 0.0
    for var in variables:
        var.value = np.ascontiguousarray(var.value)
        flat = var.value.reshape(-1)
        grad = analytic[id(var)].reshape(-1)
        for i in rng.choice(flat.size, size=min(samples, flat.size), replace=False):
            original = flat[i]
            flat[i] = original + h
            plus = float(fn().value)
            flat[i] = original - h
            minus = float(fn().value)
            flat[i] = original
            a = np.array([grad[i]])
            central = np.array([(plus - minus) / (2.0 * h)])
            if max(abs(a[0]), abs(central[0])) <= atol:
                continue
            error = relative_error(a, central)
            if error > tolerance:
                right = np.array([(plus - base) / h])
                left = np.array([(base - minus) / h])
                if relative_error(left, right) > tolerance:
                    error = min(relative_error(a, right), relative_error(a, left))
                    if error <= kink_tolerance:
                        continue
                raise AssertionError(
                    f"gradient check failed at {var.name}[{i}]: analytic {a[0]:.6e}, "
                    f"numeric {central[0]:.6e}")
            worst = max(worst, error)
    return worst
