from typing import Any, List, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from app.constants.app_constants import AppConstants
from app.models.camera_model import Camera
from app.models.gaussian_cloud_model import GaussianCloud


class CameraRecord(BaseModel):
    """One manifest entry: intrinsics, extrinsics and an optional image path."""
    model_config = ConfigDict(extra="forbid")

    width: int = Field(..., ge=1)
    height: int = Field(..., ge=1)
    fx: float = Field(..., gt=0.0)
    fy: float = Field(..., gt=0.0)
    cx: float
    cy: float
    world_to_camera: List[List[float]]
    near_clip: float = AppConstants.NEAR_CLIP
    image: Optional[str] = None

    def to_camera(self) -> Camera:
        return Camera(width=self.width, height=self.height, fx=self.fx, fy=self.fy, cx=self.cx, cy=self.cy,
                      world_to_camera=self.world_to_camera, near_clip=self.near_clip)

    @classmethod
    def from_camera(cls, camera: Camera, image: Optional[str] = None) -> "CameraRecord":
        return cls(**camera.to_record(), image=image)


class SceneManifest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cameras: List[CameraRecord]
    train: List[int] = Field(default_factory=list)
    eval: List[int] = Field(default_factory=list)
    background: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    @model_validator(mode="after")
    def _check_split(self):
        n = len(self.cameras)
        for name in ("train", "eval"):
            bad = [i for i in getattr(self, name) if not 0 <= i < n]
            if bad:
                raise ValueError(f"{name} split references missing cameras {bad}")
        if not self.train and not self.eval:
            self.train = list(range(n))
        return self


class SceneConfig(BaseModel):
    """`scene.*` config keys for the synthetic scene."""
    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    n_gaussians: int = Field(AppConstants.SCENE_N_GAUSSIANS, ge=1)
    n_cameras: int = Field(AppConstants.SCENE_N_CAMERAS, ge=2)
    width: int = Field(AppConstants.SCENE_WIDTH, ge=1)
    height: int = Field(AppConstants.SCENE_HEIGHT, ge=1)
    camera_radius: float = Field(AppConstants.SCENE_RADIUS, gt=0.0)
    extent: float = Field(AppConstants.SCENE_EXTENT, gt=0.0)
    overprovision: int = Field(AppConstants.SCENE_OVERPROVISION, ge=1)
    max_eval_views: int = Field(AppConstants.SCENE_MAX_EVAL_VIEWS, ge=1)
    sh_degree: int = Field(AppConstants.MAX_SH_DEGREE, ge=0, le=AppConstants.MAX_SH_DEGREE)
    fov_x: float = Field(0.9, gt=0.0, lt=3.0)
    background: Tuple[float, float, float] = (1.0, 1.0, 1.0)

    @field_validator("background", mode="before")
    @classmethod
    def _parse_color(cls, value):
        if isinstance(value, str):
            value = [float(part) for part in value.split(",")]
        return tuple(value)


class SyntheticScene(BaseModel):
    """Ground-truth cloud, its naive-rendered targets and an over-provisioned starting cloud."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    cloud: GaussianCloud
    initial_cloud: GaussianCloud
    cameras: List[Camera]
    targets: List[Any]
    train_index: List[int]
    eval_index: List[int]
    background: Tuple[float, float, float]
    extent: float
