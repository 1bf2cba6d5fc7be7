from typing import Any, Dict
import numpy as np
from pydantic import BaseModel, ConfigDict
from app.enums.gradient_class import GradientClass
from app.enums.parameter_group import ParameterGroup


class GradientSet(BaseModel):
    """
    Gradients for every Gaussian parameter and the soft mask of one step.

    `d_screen_norm` is the NDC-scaled norm of the mean2d gradient, summed
    over views, and `visible` marks Gaussians projected in this step; both
    feed the densification statistics.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    d_centers: Any
    d_opacity_logits: Any
    d_log_scales: Any
    d_rotations: Any
    d_sh: Any
    d_mask_soft: Any
    d_screen_norm: Any
    visible: Any
    overflow_count: int = 0
    guarded_count: int = 0

    @classmethod
    def zeros(cls, n: int, sh_count: int) -> "GradientSet":
        return cls(
            d_centers=np.zeros((n, 3)),
            d_opacity_logits=np.zeros(n),
            d_log_scales=np.zeros((n, 3)),
            d_rotations=np.zeros((n, 4)),
            d_sh=np.zeros((n, sh_count, 3)),
            d_mask_soft=np.zeros(n),
            d_screen_norm=np.zeros(n),
            visible=np.zeros(n, dtype=bool),
        )

    @property
    def n(self) -> int:
        return int(self.d_centers.shape[0])

    def by_class(self) -> Dict[GradientClass, np.ndarray]:
        return {
            GradientClass.CENTERS: self.d_centers,
            GradientClass.OPACITY_LOGITS: self.d_opacity_logits,
            GradientClass.LOG_SCALES: self.d_log_scales,
            GradientClass.ROTATIONS: self.d_rotations,
            GradientClass.SH: self.d_sh,
            GradientClass.MASK_SOFT: self.d_mask_soft,
        }

    def by_group(self, d_mask_logits: np.ndarray) -> Dict[ParameterGroup, np.ndarray]:
        """Gradients keyed like GaussianCloud.parameters()."""
        return {
            ParameterGroup.CENTERS: self.d_centers,
            ParameterGroup.OPACITY_LOGITS: self.d_opacity_logits,
            ParameterGroup.LOG_SCALES: self.d_log_scales,
            ParameterGroup.ROTATIONS: self.d_rotations,
            ParameterGroup.SH_DC: self.d_sh[:, :1, :],
            ParameterGroup.SH_REST: self.d_sh[:, 1:, :],
            ParameterGroup.MASK_LOGITS: d_mask_logits,
        }

    def scaled(self, factor: float) -> "GradientSet":
        values = {name: getattr(self, name) * factor for name in
                  ("d_centers", "d_opacity_logits", "d_log_scales", "d_rotations", "d_sh", "d_mask_soft")}
        return GradientSet(**values, d_screen_norm=self.d_screen_norm.copy(), visible=self.visible.copy(),
                           overflow_count=self.overflow_count, guarded_count=self.guarded_count)
