import logging
from typing import Dict, Mapping
import numpy as np
from app.base.exceptions import NonFiniteError
from app.constants.app_constants import AppConstants
from app.constants.log_messages import LogMessages
from app.enums.parameter_group import ParameterGroup


class Adam:
    """
    Adam over named parameter groups, updated in place. Moments are kept
    per group and follow the Gaussians through prune / densify compaction.
    """

    def __init__(self, betas=AppConstants.ADAM_BETAS, eps: float = AppConstants.ADAM_EPS) -> None:
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.exp_avg: Dict[ParameterGroup, np.ndarray] = {}
        self.exp_avg_sq: Dict[ParameterGroup, np.ndarray] = {}
        self.steps: Dict[ParameterGroup, int] = {}

    def _state(self, group: ParameterGroup, param: np.ndarray):
        if group not in self.exp_avg or self.exp_avg[group].shape != param.shape:
            self.exp_avg[group] = np.zeros_like(param)
            self.exp_avg_sq[group] = np.zeros_like(param)
            self.steps[group] = 0
        return self.exp_avg[group], self.exp_avg_sq[group]

    def step(self, params: Mapping[ParameterGroup, np.ndarray], grads: Mapping[ParameterGroup, np.ndarray],
             lrs: Mapping[ParameterGroup, float], iteration: int = -1) -> None:
        for group, grad in grads.items():
            if not np.all(np.isfinite(grad)):
                message = LogMessages.NON_FINITE.format("gradient", iteration, group.value)
                logging.error(message)
                raise NonFiniteError(message, {"group": group.value, "iteration": iteration,
                                               "non_finite": int(np.count_nonzero(~np.isfinite(grad)))})
        for group, param in params.items():
            lr = lrs.get(group, 0.0)
            if group not in grads or param.size == 0:
                continue
            grad = grads[group]
            exp_avg, exp_avg_sq = self._state(group, param)
            self.steps[group] += 1
            t = self.steps[group]
            exp_avg *= self.beta1
            exp_avg += (1.0 - self.beta1) * grad
            exp_avg_sq *= self.beta2
            exp_avg_sq += (1.0 - self.beta2) * grad * grad
            m_hat = exp_avg / (1.0 - self.beta1 ** t)
            v_hat = exp_avg_sq / (1.0 - self.beta2 ** t)
            param -= lr * m_hat / (np.sqrt(v_hat) + self.eps)
        rotations = params.get(ParameterGroup.ROTATIONS)
        if rotations is not None and rotations.size:
            rotations /= np.linalg.norm(rotations, axis=1, keepdims=True)

    def select(self, keep: np.ndarray) -> None:
        """Drop the moments of removed Gaussians."""
        for group in list(self.exp_avg):
            self.exp_avg[group] = self.exp_avg[group][keep]
            self.exp_avg_sq[group] = self.exp_avg_sq[group][keep]

    def extend(self, count: int) -> None:
        """Zero moments for `count` Gaussians appended at the end."""
        for group in list(self.exp_avg):
            pad = np.zeros((count,) + self.exp_avg[group].shape[1:])
            self.exp_avg[group] = np.concatenate([self.exp_avg[group], pad])
            self.exp_avg_sq[group] = np.concatenate([self.exp_avg_sq[group], pad.copy()])

    def reset_rows(self, group: ParameterGroup, rows: np.ndarray = None) -> None:
        if group not in self.exp_avg:
            return
        if rows is None:
            rows = slice(None)
        self.exp_avg[group][rows] = 0.0
        self.exp_avg_sq[group][rows] = 0.0

    def state_arrays(self) -> Dict[str, np.ndarray]:
        arrays = {}
        for group in self.exp_avg:
            arrays[f"{group.value}.exp_avg"] = self.exp_avg[group]
            arrays[f"{group.value}.exp_avg_sq"] = self.exp_avg_sq[group]
            arrays[f"{group.value}.step"] = np.array(self.steps[group])
        return arrays
