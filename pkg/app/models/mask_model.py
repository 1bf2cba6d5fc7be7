from typing import Any, Optional, Tuple
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from app.constants.app_constants import AppConstants
from app.enums.mask_loss_kind import MaskLossKind
from app.enums.mask_mode import MaskMode


class MaskSample(BaseModel):
    """
    One existence sample per Gaussian. The forward pass consumes `hard`;
    gradients w.r.t. the mask flow through `soft`, whose derivative w.r.t.
    (z_present - z_absent) is `soft_slope`.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    hard: Any
    soft: Any
    soft_slope: Any
    pass_through: bool = True
    mode: MaskMode = MaskMode.GUMBEL

    @field_validator("hard", "soft", "soft_slope", mode="before")
    @classmethod
    def _as_vector(cls, value):
        return np.asarray(value, dtype=np.float64).reshape(-1)

    @model_validator(mode="after")
    def _check(self):
        if not (self.hard.shape == self.soft.shape == self.soft_slope.shape):
            raise ValueError("hard, soft and soft_slope must share one length")
        if np.any((self.hard != 0.0) & (self.hard != 1.0)):
            raise ValueError("hard masks must be binary")
        return self

    @property
    def n(self) -> int:
        return int(self.hard.shape[0])

    @property
    def forward_values(self) -> np.ndarray:
        return self.hard if self.pass_through else self.soft

    @classmethod
    def ones(cls, n: int) -> "MaskSample":
        return cls(hard=np.ones(n), soft=np.ones(n), soft_slope=np.zeros(n), mode=MaskMode.ALL_ON)

    @classmethod
    def from_hard(cls, hard) -> "MaskSample":
        """Fixed binary masks with no logit path (tests, oracle comparisons)."""
        hard = np.asarray(hard, dtype=np.float64)
        return cls(hard=hard, soft=hard.copy(), soft_slope=np.zeros_like(hard), mode=MaskMode.ALL_ON)

    @classmethod
    def relaxed(cls, values) -> "MaskSample":
        """Continuous masks in [0, 1] consumed as-is by the forward pass."""
        values = np.asarray(values, dtype=np.float64)
        return cls(hard=(values >= 0.5).astype(np.float64), soft=values, soft_slope=np.zeros_like(values),
                   pass_through=False, mode=MaskMode.ALL_ON)


class MaskConfig(BaseModel):
    """`mask.*` config keys; `lambda` is accepted as an alias of lambda_m."""
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    temperature: float = Field(AppConstants.MASK_TEMPERATURE, gt=0.0)
    mode: MaskMode = MaskMode.GUMBEL
    ste_threshold: float = Field(AppConstants.STE_THRESHOLD, ge=0.0, le=1.0)
    lambda_m: float = Field(0.0, ge=0.0, alias="lambda")
    loss_kind: MaskLossKind = MaskLossKind.SQUARED
    init_logits: Tuple[float, float] = AppConstants.MASK_INIT_LOGITS
    prune_repeats: int = Field(AppConstants.MASK_PRUNE_REPEATS, ge=1)
    learning_rate: float = Field(AppConstants.MASK_LR, ge=0.0)
    seed: int = 0
    schedule: Optional[str] = None

    @field_validator("init_logits", mode="before")
    @classmethod
    def _parse_pair(cls, value):
        if isinstance(value, str):
            value = [float(part) for part in value.split(",")]
        return tuple(value)
