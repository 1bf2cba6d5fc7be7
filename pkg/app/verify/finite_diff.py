"""
Numeric derivatives of a scalar loss w.r.t. one entry of a parameter array.

`loss_fn()` reads the array in place and returns either the loss or
(loss, signature); when both evaluations carry a signature and they differ,
the step crossed a cutoff or clamp and the entry is flagged.
"""
from typing import Any, Callable, Optional, Tuple, Union
import numpy as np
from pydantic import BaseModel
from app.constants.app_constants import AppConstants

LossResult = Union[float, Tuple[float, Any]]


class ParamSelector:
    """One scalar entry of a parameter array, perturbed in place."""

    def __init__(self, array: np.ndarray, index) -> None:
        self.array = array
        self.index = tuple(np.atleast_1d(index)) if not isinstance(index, tuple) else index

    def get(self) -> float:
        return float(self.array[self.index])

    def set(self, value: float) -> None:
        self.array[self.index] = value


class FiniteDiffResult(BaseModel):
    value: float
    flagged: bool = False
    reason: Optional[str] = None
    step: float = 0.0


def _evaluate(loss_fn: Callable[[], LossResult]) -> Tuple[float, Any]:
    result = loss_fn()
    if isinstance(result, tuple):
        return float(result[0]), result[1]
    return float(result), None


def _signatures_differ(left, right) -> bool:
    if left is None or right is None:
        return False
    if hasattr(left, "matches"):
        return not left.matches(right)
    return not np.array_equal(left, right)


def scaled_step(x: float, h: float) -> float:
    return h * max(1.0, abs(x))


def finite_diff(param_selector: ParamSelector, loss_fn: Callable[[], LossResult],
                h: float = AppConstants.FD_STEP, direction: int = 0) -> FiniteDiffResult:
    """
    direction 0: central difference; +1 / -1: one-sided into x + h / x - h.
    The parameter is restored before returning.
    """
    if h <= 0.0:
        raise ValueError("finite-difference step must be positive")
    x = param_selector.get()
    step = scaled_step(x, h)
    try:
        if direction == 0:
            param_selector.set(x + step)
            f_hi, sig_hi = _evaluate(loss_fn)
            param_selector.set(x - step)
            f_lo, sig_lo = _evaluate(loss_fn)
            value = (f_hi - f_lo) / (2.0 * step)
        else:
            param_selector.set(x)
            f_0, sig_0 = _evaluate(loss_fn)
            param_selector.set(x + direction * step)
            f_1, sig_1 = _evaluate(loss_fn)
            value = (f_1 - f_0) / (direction * step)
            sig_hi, sig_lo = sig_1, sig_0
    finally:
        param_selector.set(x)

    if not np.isfinite(value):
        return FiniteDiffResult(value=float("nan"), flagged=True, reason="non-finite", step=step)
    if _signatures_differ(sig_hi, sig_lo):
        return FiniteDiffResult(value=value, flagged=True, reason="discontinuity", step=step)
    return FiniteDiffResult(value=value, step=step)


def numeric_gradient(f: Callable[[np.ndarray], float], x: np.ndarray,
                     h: float = AppConstants.FD_STEP) -> np.ndarray:
    """Central-difference gradient of f at every entry of x."""
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for index in np.ndindex(x.shape):
        result = finite_diff(ParamSelector(x, index), lambda: f(x), h)
        grad[index] = result.value
    return grad
