"""Seeded, deterministic minimizers for smooth unconstrained objectives.

Both take ``fun(w) -> (loss, grad)`` and only ever accept steps that
decrease the loss (Armijo backtracking), so the recorded history is
non-increasing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

Objective = Callable[[np.ndarray], "tuple[float, np.ndarray]"]

ARMIJO_C = 1e-4
MIN_STEP = 1e-10


@dataclass
class OptimResult:
    x: np.ndarray
    history: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def _backtrack(fun, x, f, g, direction, step):
    slope = float(g @ direction)
    while step >= MIN_STEP:
        x_new = x + step * direction
        f_new, g_new = fun(x_new)
        if np.isfinite(f_new) and f_new <= f + ARMIJO_C * step * slope:
            return step, x_new, f_new, g_new
        step *= 0.5
    return None


def gradient_descent(fun: Objective, x0: np.ndarray, max_iter: int, tol: float, step0: float = 1.0) -> OptimResult:
    x = np.array(x0, dtype=float)
    f, g = fun(x)
    res = OptimResult(x, [f])
    step = step0
    for _ in range(max_iter):
        found = _backtrack(fun, x, f, g, -g, step)
        if found is None:
            res.converged = True
            break
        used, x, f_new, g = found
        res.iterations += 1
        res.history.append(f_new)
        improvement, f = f - f_new, f_new
        if improvement < tol:
            res.converged = True
            break
        # grow after a first-try success, otherwise resume from the accepted step
        step = used * 2.0 if used == step else used
    res.x = x
    return res


def bfgs(fun: Objective, x0: np.ndarray, max_iter: int, tol: float) -> OptimResult:
    x = np.array(x0, dtype=float)
    f, g = fun(x)
    res = OptimResult(x, [f])
    n = x.size
    H = np.eye(n)
    for _ in range(max_iter):
        d = -H @ g
        if g @ d >= 0:  # lost descent; restart from steepest descent
            H = np.eye(n)
            d = -g
        found = _backtrack(fun, x, f, g, d, 1.0)
        if found is None:
            res.converged = True
            break
        step, x_new, f_new, g_new = found
        s, yv = x_new - x, g_new - g
        sy = float(s @ yv)
        if sy > 1e-12:
            rho = 1.0 / sy
            I = np.eye(n)
            H = (I - rho * np.outer(s, yv)) @ H @ (I - rho * np.outer(yv, s)) + rho * np.outer(s, s)
        res.iterations += 1
        res.history.append(f_new)
        improvement = f - f_new
        x, f, g = x_new, f_new, g_new
        if improvement < tol:
            res.converged = True
            break
    res.x = x
    return res


OPTIMIZERS = {"gd": gradient_descent, "bfgs": bfgs}
