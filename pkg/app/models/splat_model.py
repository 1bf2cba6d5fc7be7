from typing import Any
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Splat2D(BaseModel):
    """Projected Gaussian for one camera."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    mean2d: Any = Field(..., description="2D mean in pixels")
    cov2d_inv: Any = Field(..., description="symmetric positive-definite 2x2 conic")
    depth: float
    color: Any
    opacity: float = Field(..., gt=0.0, le=1.0)
    source_index: int = 0
    radius: float = 0.0

    @field_validator("mean2d", "color", mode="before")
    @classmethod
    def _as_vector(cls, value):
        return np.asarray(value, dtype=np.float64).reshape(-1)

    @field_validator("cov2d_inv", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        return np.asarray(value, dtype=np.float64).reshape(2, 2)

    @model_validator(mode="after")
    def _check_conic(self):
        conic = self.cov2d_inv
        if not np.allclose(conic, conic.T):
            raise ValueError("cov2d_inv must be symmetric")
        if conic[0, 0] <= 0.0 or np.linalg.det(conic) <= 0.0:
            raise ValueError("cov2d_inv must be positive-definite")
        return self

    @property
    def conic(self) -> np.ndarray:
        """(a, b, c) of the symmetric conic [[a, b], [b, c]]."""
        return np.array([self.cov2d_inv[0, 0], self.cov2d_inv[0, 1], self.cov2d_inv[1, 1]])


class SplatBatch(BaseModel):
    """
    All visible splats of one camera, struct-of-arrays. Index s runs over
    visible splats; `source_index[s]` points back into the GaussianCloud.
    The geometric intermediates are kept for the backward chain.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    means2d: Any
    conics: Any
    cov2d: Any
    depths: Any
    colors: Any
    colors_raw: Any
    opacities: Any
    radii: Any
    source_index: Any
    cam_points: Any
    view_dirs: Any
    cov3d: Any
    jacobians: Any
    width: int
    height: int
    skipped_singular: int = 0
    n_source: int = 0

    @property
    def n(self) -> int:
        return int(self.source_index.shape[0])

    def splat(self, s: int) -> Splat2D:
        a, b, c = self.conics[s]
        return Splat2D(
            mean2d=self.means2d[s],
            cov2d_inv=[[a, b], [b, c]],
            depth=float(self.depths[s]),
            color=self.colors[s],
            opacity=float(self.opacities[s]),
            source_index=int(self.source_index[s]),
            radius=float(self.radii[s]),
        )
