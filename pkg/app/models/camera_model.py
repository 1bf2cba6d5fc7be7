from typing import Any
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from app.constants.app_constants import AppConstants


class Camera(BaseModel):
    """
    Pinhole camera with a rigid world-to-camera transform.
    Pixel centres sit at integer pixel coordinates.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    width: int = Field(..., ge=1, description="Image width in pixels")
    height: int = Field(..., ge=1, description="Image height in pixels")
    fx: float = Field(..., gt=0)
    fy: float = Field(..., gt=0)
    cx: float
    cy: float
    world_to_camera: Any = Field(..., description="3x4 rigid transform [R | t]")
    near_clip: float = AppConstants.NEAR_CLIP

    @field_validator("world_to_camera", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        matrix = np.asarray(value, dtype=np.float64)
        if matrix.shape == (4, 4):
            matrix = matrix[:3]
        if matrix.shape != (3, 4):
            raise ValueError(f"world_to_camera must be 3x4, got {matrix.shape}")
        return matrix

    @model_validator(mode="after")
    def _check_rotation(self):
        rotation = self.world_to_camera[:, :3]
        if not np.allclose(rotation @ rotation.T, np.eye(3), atol=1e-6):
            raise ValueError("rotation block of world_to_camera is not orthonormal")
        return self

    @property
    def rotation(self) -> np.ndarray:
        return self.world_to_camera[:, :3]

    @property
    def translation(self) -> np.ndarray:
        return self.world_to_camera[:, 3]

    @property
    def center(self) -> np.ndarray:
        return -self.rotation.T @ self.translation

    def to_camera(self, points: np.ndarray) -> np.ndarray:
        return points @ self.rotation.T + self.translation

    def pixel_grid(self) -> tuple:
        ys, xs = np.meshgrid(np.arange(self.height, dtype=np.float64),
                             np.arange(self.width, dtype=np.float64), indexing="ij")
        return xs, ys

    def to_record(self) -> dict:
        return {
            "width": self.width, "height": self.height,
            "fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy,
            "world_to_camera": self.world_to_camera.tolist(),
            "near_clip": self.near_clip,
        }

    @classmethod
    def look_at(cls, eye, target, up, width: int, height: int, fov_x: float,
                near_clip: float = AppConstants.NEAR_CLIP) -> "Camera":
        """Camera at `eye` looking at `target`; +z forward, +y down in the image."""
        eye = np.asarray(eye, dtype=np.float64)
        forward = np.asarray(target, dtype=np.float64) - eye
        forward /= np.linalg.norm(forward)
        right = np.cross(forward, np.asarray(up, dtype=np.float64))
        right /= np.linalg.norm(right)
        down = np.cross(forward, right)
        rotation = np.stack([right, down, forward])
        translation = -rotation @ eye
        fx = 0.5 * width / np.tan(0.5 * fov_x)
        return cls(
            width=width, height=height, fx=fx, fy=fx,
            cx=(width - 1) / 2.0, cy=(height - 1) / 2.0,
            world_to_camera=np.concatenate([rotation, translation[:, None]], axis=1),
            near_clip=near_clip,
        )
