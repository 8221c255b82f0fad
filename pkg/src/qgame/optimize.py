"""Gradient descent with backtracking line search, shared by the entropy
searches.

Gradients come either from a caller-supplied function or from central finite
differences; both drive the same Armijo backtracking loop, so the two modes
accept identical optima and can cross-check each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

FD_STEP = 1e-5
ARMIJO_C = 1e-4


@dataclass
class MinimizeResult:
    x: np.ndarray
    value: float
    iterations: int
    converged: bool
    trace: list[float] = field(default_factory=list)


def fd_gradient(
    f: Callable[[np.ndarray], float], x: np.ndarray, step: float = FD_STEP
) -> np.ndarray:
    """Central finite-difference gradient."""
    g = np.zeros_like(x, dtype=float)
    for i in range(len(x)):
        e = np.zeros_like(x, dtype=float)
        e[i] = step
        g[i] = (f(x + e) - f(x - e)) / (2.0 * step)
    return g


def minimize(
    f: Callable[[np.ndarray], float],
    x0: np.ndarray,
    grad: Callable[[np.ndarray], np.ndarray] | None = None,
    max_iter: int = 500,
    gtol: float = 1e-7,
    ftol: float = 1e-10,
    fd_step: float = FD_STEP,
    target: float | None = None,
    keep_trace: bool = False,
) -> MinimizeResult:
    """Backtracking-line-search descent of ``f`` from ``x0``.

    Steps along -gradient with an Armijo acceptance test; the trial step
    doubles after a clean accept and halves on rejection, and only improving
    steps are ever accepted (the value trace is monotone nonincreasing).
    Stops on gradient norm below ``gtol``, improvement below ``ftol``, a
    failed line search, or reaching ``target``.
    """
    x = np.array(x0, dtype=float)
    fx = f(x)
    step = 1.0
    trace = [fx] if keep_trace else []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        if target is not None and fx <= target:
            converged = True
            break
        g = grad(x) if grad is not None else fd_gradient(f, x, fd_step)
        gnorm2 = float(np.dot(g, g))
        if np.sqrt(gnorm2) < gtol:
            converged = True
            break
        step = min(step * 2.0, 1.0e2)
        accepted = False
        while step > 1e-14:
            x_new = x - step * g
            f_new = f(x_new)
            if f_new <= fx - ARMIJO_C * step * gnorm2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True
            break
        improvement = fx - f_new
        x, fx = x_new, f_new
        if keep_trace:
            trace.append(fx)
        if improvement < ftol:
            converged = True
            break
    return MinimizeResult(
        x=x, value=fx, iterations=it, converged=converged, trace=trace
    )
