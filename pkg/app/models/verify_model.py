from typing import Dict, List, Optional
from pydantic import BaseModel, ConfigDict, Field
from app.constants.app_constants import AppConstants
from app.enums.precision import Precision


class Tolerances(BaseModel):
    model_config = ConfigDict(extra="forbid")

    float64: float = Field(AppConstants.TOLERANCE_FLOAT64, gt=0.0)
    float32: float = Field(AppConstants.TOLERANCE_FLOAT32, gt=0.0)
    mask_float64: float = Field(AppConstants.MASK_TOLERANCE_FLOAT64, gt=0.0)

    def for_precision(self, precision: Precision, mask: bool = False) -> float:
        if precision is Precision.FLOAT32:
            return self.float32
        return self.mask_float64 if mask else self.float64


class VerifyConfig(BaseModel):
    """`verify.*` config keys."""
    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    n_scenes: int = Field(20, ge=0)
    max_gaussians: int = Field(64, ge=1)
    width: int = Field(32, ge=1)
    height: int = Field(32, ge=1)
    entries_per_class: int = Field(16, ge=1)
    fd_step: float = Field(AppConstants.FD_STEP, gt=0.0)
    grad_floor: float = Field(AppConstants.GRAD_FLOOR, gt=0.0)
    relative_floor: float = Field(AppConstants.RELATIVE_FLOOR, ge=0.0)
    precision: Precision = Precision.FLOAT64
    tolerances: Tolerances = Field(default_factory=Tolerances)
    sampler_draws: int = Field(100000, ge=AppConstants.SAMPLER_MIN_DRAWS)
    sampler_z_limit: float = Field(AppConstants.SAMPLER_Z_LIMIT, gt=0.0)


class ClassResult(BaseModel):
    max_rel_error: float = 0.0
    mean_rel_error: float = 0.0
    checked: int = 0
    skipped: int = 0
    tolerance: float = 0.0
    passed: bool = True
    worst: Optional[dict] = None


class GradCheckReport(BaseModel):
    seed: int
    n_scenes: int
    precision: Precision
    tolerances: Tolerances
    classes: Dict[str, ClassResult] = Field(default_factory=dict)
    scene_hashes: List[str] = Field(default_factory=list)
    descriptor_hash: str = ""
    passed: bool = True
    warnings: List[str] = Field(default_factory=list)


class SamplerEntry(BaseModel):
    logit_gap: float
    existence_prob: float
    frequency: float
    z_score: float
    passed: bool


class SamplerStatsReport(BaseModel):
    seed: int
    draws: int
    temperature: float
    z_limit: float
    entries: List[SamplerEntry] = Field(default_factory=list)
    passed: bool = True
