from typing import Any, Optional
import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from app.constants.app_constants import AppConstants
from app.enums.precision import Precision
from app.enums.raster_mode import RasterMode
from app.models.mask_model import MaskSample
from app.models.splat_model import SplatBatch


class RasterSettings(BaseModel):
    """`raster.*` config keys."""
    model_config = ConfigDict(extra="forbid")

    tile_size: int = Field(AppConstants.TILE_SIZE, ge=1)
    alpha_min: float = Field(AppConstants.ALPHA_MIN, gt=0.0, lt=1.0)
    alpha_max: float = Field(AppConstants.ALPHA_MAX, gt=0.0, lt=1.0)
    early_stop: float = Field(AppConstants.EARLY_STOP_T, ge=0.0, lt=1.0)
    max_contributors: int = Field(AppConstants.MAX_CONTRIBUTORS, ge=1)
    cov_floor: float = Field(AppConstants.COV2D_FLOOR, ge=0.0)
    denom_floor: float = Field(AppConstants.DENOM_FLOOR, gt=0.0)
    precision: Precision = Precision.FLOAT32
    mode: RasterMode = RasterMode.MASKED_BLEND
    gradient_mode: bool = True
    sh_degree: Optional[int] = Field(None, ge=0, le=AppConstants.MAX_SH_DEGREE)

    @classmethod
    def verification(cls, **overrides) -> "RasterSettings":
        """float64, no early stop: the configuration the oracle comparisons use."""
        values = dict(precision=Precision.FLOAT64, early_stop=0.0)
        values.update(overrides)
        return cls(**values)


class TileBinning(BaseModel):
    """
    Tile lists as one flat array of splat slots. Entries of tile t live in
    entries[ranges[t, 0]:ranges[t, 1]], sorted by (depth, source_index).
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    tile_size: int
    tiles_x: int
    tiles_y: int
    entries: Any
    entry_tiles: Any
    ranges: Any
    radii: Any

    @property
    def n_tiles(self) -> int:
        return self.tiles_x * self.tiles_y

    @property
    def n_entries(self) -> int:
        return int(self.entries.shape[0])

    def tile_list(self, tile_x: int, tile_y: int) -> np.ndarray:
        start, end = self.ranges[tile_y * self.tiles_x + tile_x]
        return self.entries[start:end]


class FrameBuffer(BaseModel):
    """
    Rendered image plus what the backward pass needs. Contributor records
    of tile t occupy record_base[t] + local_pixel * record_stride[t] + k.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    color: Any
    final_transmittance: Any
    n_contrib: Any
    background: Any
    overflow_count: int = 0
    record_entry: Optional[Any] = None
    record_alpha: Optional[Any] = None
    record_transmittance: Optional[Any] = None
    record_base: Optional[Any] = None
    record_stride: Optional[Any] = None
    splats: Optional[SplatBatch] = None
    binning: Optional[TileBinning] = None
    masks: Optional[MaskSample] = None
    slot_masks: Optional[Any] = None
    settings: Optional[RasterSettings] = None

    @property
    def height(self) -> int:
        return int(self.color.shape[0])

    @property
    def width(self) -> int:
        return int(self.color.shape[1])

    @property
    def has_records(self) -> bool:
        return self.record_entry is not None

    def contributors(self, px: int, py: int) -> dict:
        """Records of one pixel in front-to-back order, as slot-level arrays."""
        if not self.has_records:
            raise ValueError("FrameBuffer was rendered without gradient mode")
        ts = self.binning.tile_size
        tile = (py // ts) * self.binning.tiles_x + (px // ts)
        local = (py - (py // ts) * ts) * ts + (px - (px // ts) * ts)
        start = int(self.record_base[tile] + local * self.record_stride[tile])
        count = int(self.n_contrib[py, px])
        entry = self.record_entry[start:start + count]
        slots = self.binning.entries[entry]
        return {
            "slot": slots,
            "source_index": self.splats.source_index[slots],
            "alpha": self.record_alpha[start:start + count].astype(np.float64),
            "transmittance": self.record_transmittance[start:start + count].astype(np.float64),
            "mask": self.slot_masks[slots].astype(np.float64),
            "color": self.splats.colors[slots],
        }
