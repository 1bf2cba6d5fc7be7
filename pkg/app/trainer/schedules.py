from typing import List
import numpy as np
from app.enums.parameter_group import ParameterGroup
from app.enums.schedule_preset import SchedulePreset
from app.models.mask_model import MaskConfig
from app.models.train_model import LambdaWindow, LearningRates, TrainConfig

PRESET_LENGTH = 30000


def preset_windows(preset: SchedulePreset, iterations: int = PRESET_LENGTH) -> List[LambdaWindow]:
    """Ours-beta/gamma cover the whole run; Ours-alpha is a single late burst."""
    span = max(PRESET_LENGTH, iterations)
    if preset is SchedulePreset.OURS_ALPHA:
        return [LambdaWindow(start=19000, end=20000, value=0.1)]
    if preset is SchedulePreset.OURS_BETA:
        return [LambdaWindow(start=0, end=span, value=0.0005)]
    if preset is SchedulePreset.OURS_GAMMA:
        return [LambdaWindow(start=0, end=span, value=0.001)]
    return []


class LambdaSchedule:
    """lambda_m per iteration from windows, a preset, or the constant mask.lambda."""

    def __init__(self, train: TrainConfig, mask: MaskConfig) -> None:
        if train.lambda_windows:
            self.windows = list(train.lambda_windows)
        elif train.preset is not SchedulePreset.NONE:
            self.windows = preset_windows(train.preset, train.iterations)
        else:
            self.windows = [LambdaWindow(start=0, end=max(train.iterations, 1), value=mask.lambda_m)] \
                if mask.lambda_m > 0.0 else []

    def __call__(self, iteration: int) -> float:
        for window in self.windows:
            if window.start <= iteration < window.end:
                return window.value
        return 0.0

    @property
    def active_at_all(self) -> bool:
        return any(window.value > 0.0 for window in self.windows)


def exponential_lr(step: int, lr_init: float, lr_final: float, max_steps: int) -> float:
    """Log-linear interpolation from lr_init to lr_final over max_steps."""
    if max_steps <= 0 or lr_init == 0.0:
        return lr_init
    t = np.clip(step / max_steps, 0.0, 1.0)
    return float(np.exp(np.log(lr_init) * (1.0 - t) + np.log(lr_final) * t))


def learning_rates(rates: LearningRates, mask_lr: float, iteration: int, iterations: int,
                   extent: float) -> dict:
    return {
        ParameterGroup.CENTERS: exponential_lr(iteration, rates.position_init * extent,
                                               rates.position_final * extent, iterations),
        ParameterGroup.OPACITY_LOGITS: rates.opacity,
        ParameterGroup.LOG_SCALES: rates.scaling,
        ParameterGroup.ROTATIONS: rates.rotation,
        ParameterGroup.SH_DC: rates.sh_dc,
        ParameterGroup.SH_REST: rates.sh_rest,
        ParameterGroup.MASK_LOGITS: mask_lr,
    }
