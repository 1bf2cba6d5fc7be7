from typing import List, Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from app.constants.app_constants import AppConstants
from app.enums.schedule_preset import SchedulePreset


class LambdaWindow(BaseModel):
    """lambda_m applies on iterations [start, end)."""
    start: int = Field(..., ge=0)
    end: int = Field(..., ge=0)
    value: float = Field(..., ge=0.0)

    @model_validator(mode="after")
    def _check_order(self):
        if self.end <= self.start:
            raise ValueError(f"lambda window [{self.start}, {self.end}) is empty")
        return self


class LearningRates(BaseModel):
    model_config = ConfigDict(extra="forbid")

    position_init: float = AppConstants.POSITION_LR_INIT
    position_final: float = AppConstants.POSITION_LR_FINAL
    sh_dc: float = AppConstants.SH_DC_LR
    sh_rest: float = AppConstants.SH_REST_LR
    opacity: float = AppConstants.OPACITY_LR
    scaling: float = AppConstants.SCALING_LR
    rotation: float = AppConstants.ROTATION_LR


class DensifyConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    enabled: bool = True
    start: int = Field(AppConstants.DENSIFY_FROM, ge=0)
    stop: int = Field(AppConstants.DENSIFY_UNTIL, ge=0)
    interval: int = Field(AppConstants.DENSIFY_INTERVAL, ge=1)
    grad_threshold: float = Field(AppConstants.DENSIFY_GRAD_THRESHOLD, gt=0.0)
    scale_threshold: float = Field(AppConstants.PERCENT_DENSE, gt=0.0)
    split_factor: float = Field(AppConstants.SPLIT_FACTOR, gt=1.0)
    min_opacity: float = Field(AppConstants.MIN_OPACITY, ge=0.0)
    max_screen_radius: float = Field(AppConstants.MAX_SCREEN_RADIUS, gt=0.0)
    max_world_scale: float = Field(AppConstants.MAX_WORLD_SCALE, gt=0.0)
    opacity_reset_interval: int = Field(AppConstants.OPACITY_RESET_INTERVAL, ge=0)
    opacity_reset_value: float = Field(AppConstants.OPACITY_RESET_VALUE, gt=0.0, lt=1.0)


class TrainConfig(BaseModel):
    """`train.*` config keys."""
    model_config = ConfigDict(extra="forbid")

    iterations: int = Field(AppConstants.ITERATIONS, ge=1)
    ssim_weight: float = Field(AppConstants.SSIM_WEIGHT, ge=0.0, le=1.0)
    preset: SchedulePreset = SchedulePreset.NONE
    lambda_windows: List[LambdaWindow] = Field(default_factory=list)
    learning_rates: LearningRates = Field(default_factory=LearningRates)
    densify: DensifyConfig = Field(default_factory=DensifyConfig)
    prune_interval_after_densify: int = Field(AppConstants.PRUNE_INTERVAL_AFTER_DENSIFY, ge=1)
    # last mask-sampling iteration; 0 samples masks for the whole run
    mask_until: int = Field(0, ge=0)
    final_prune: bool = True
    eval_interval: int = Field(AppConstants.EVAL_INTERVAL, ge=1)
    checkpoint_interval: int = Field(AppConstants.CHECKPOINT_INTERVAL, ge=0)
    sh_degree: int = Field(AppConstants.MAX_SH_DEGREE, ge=0, le=AppConstants.MAX_SH_DEGREE)
    sh_increase_interval: int = Field(1000, ge=0)
    seed: int = 0
    progress: bool = True

    @field_validator("lambda_windows", mode="before")
    @classmethod
    def _parse_windows(cls, value):
        """Accepts `start:end:value` items separated by `;`."""
        if isinstance(value, str):
            windows = []
            for item in filter(None, (part.strip() for part in value.split(";"))):
                start, end, lam = item.split(":")
                windows.append({"start": int(start), "end": int(end), "value": float(lam)})
            return windows
        return value

    @model_validator(mode="after")
    def _check_windows(self):
        ordered = sorted(self.lambda_windows, key=lambda window: window.start)
        for left, right in zip(ordered, ordered[1:]):
            if right.start < left.end:
                raise ValueError(f"lambda windows [{left.start}, {left.end}) and "
                                 f"[{right.start}, {right.end}) overlap")
        return self


class EvalPoint(BaseModel):
    iteration: int
    psnr: float
    ssim: float
    gaussian_count: int
    wall_time: float


class PruneEvent(BaseModel):
    iteration: int
    before: int
    after: int
    reason: str


class TrainReport(BaseModel):
    eval_points: List[EvalPoint] = Field(default_factory=list)
    prune_events: List[PruneEvent] = Field(default_factory=list)
    densify_iterations: List[int] = Field(default_factory=list)
    initial_gaussian_count: int = 0
    final_gaussian_count: int = 0
    final_psnr: Optional[float] = None
    final_ssim: Optional[float] = None
    iterations: int = 0
    wall_time: float = 0.0
    overflow_total: int = 0
    guarded_total: int = 0
    losses: List[float] = Field(default_factory=list, exclude=True)
