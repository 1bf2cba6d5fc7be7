from pydantic import BaseModel, ConfigDict, Field
from app.models.mask_model import MaskConfig
from app.models.raster_model import RasterSettings
from app.models.scene_model import SceneConfig
from app.models.train_model import TrainConfig
from app.models.verify_model import VerifyConfig


class AppConfig(BaseModel):
    """Effective configuration: one section per dotted-key prefix."""
    model_config = ConfigDict(extra="forbid")

    mask: MaskConfig = Field(default_factory=MaskConfig)
    raster: RasterSettings = Field(default_factory=RasterSettings)
    train: TrainConfig = Field(default_factory=TrainConfig)
    scene: SceneConfig = Field(default_factory=SceneConfig)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)
