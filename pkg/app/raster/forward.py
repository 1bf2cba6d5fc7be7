import logging
from typing import Optional, Tuple
import numpy as np
from app.base.exceptions import InvalidArgumentError
from app.constants.log_messages import LogMessages
from app.models.camera_model import Camera
from app.models.mask_model import MaskSample
from app.models.raster_model import FrameBuffer, RasterSettings, TileBinning
from app.models.splat_model import SplatBatch
from app.raster.binning import bin_and_sort
from app.raster.kernels import forward_tiles

logger = logging.getLogger(__name__)


def _record_layout(binning: TileBinning, settings: RasterSettings) -> Tuple[np.ndarray, np.ndarray, int]:
    """Per-tile record stride min(cap, list length) and region offsets."""
    lengths = binning.ranges[:, 1] - binning.ranges[:, 0]
    stride = np.minimum(lengths, settings.max_contributors).astype(np.int64)
    sizes = stride * binning.tile_size * binning.tile_size
    base = (np.cumsum(sizes) - sizes).astype(np.int64)
    return base, stride, int(sizes.sum())


def slot_arrays(splats: SplatBatch, dtype) -> dict:
    return {
        "means2d": np.ascontiguousarray(splats.means2d, dtype=dtype),
        "conics": np.ascontiguousarray(splats.conics, dtype=dtype),
        "colors": np.ascontiguousarray(splats.colors, dtype=dtype),
        "opacities": np.ascontiguousarray(splats.opacities, dtype=dtype),
    }


def render_masked(splats: SplatBatch, masks: MaskSample, camera: Camera, background,
                  settings: Optional[RasterSettings] = None) -> FrameBuffer:
    settings = settings or RasterSettings()
    if masks.n != splats.n_source:
        raise InvalidArgumentError(f"mask length {masks.n} does not match cloud size {splats.n_source}")
    dtype = settings.precision.dtype
    background = np.asarray(background, dtype=np.float64).reshape(3)
    binning = bin_and_sort(splats, camera, settings.tile_size)
    slot_masks = np.ascontiguousarray(masks.forward_values[splats.source_index], dtype=dtype)

    if settings.gradient_mode:
        record_base, record_stride, n_records = _record_layout(binning, settings)
    else:
        record_base = np.zeros(binning.n_tiles, dtype=np.int64)
        record_stride = np.zeros(binning.n_tiles, dtype=np.int64)
        n_records = 0
    rec_entry = np.zeros(n_records, dtype=np.int64)
    rec_alpha = np.zeros(n_records, dtype=dtype)
    rec_t = np.zeros(n_records, dtype=dtype)

    color = np.zeros((camera.height, camera.width, 3), dtype=dtype)
    transmittance = np.ones((camera.height, camera.width), dtype=dtype)
    n_contrib = np.zeros((camera.height, camera.width), dtype=np.int64)
    overflow = np.zeros(binning.n_tiles, dtype=np.int64)
    arrays = slot_arrays(splats, dtype)
    forward_tiles(arrays["means2d"], arrays["conics"], arrays["colors"], arrays["opacities"], slot_masks,
                  binning.entries, binning.ranges, binning.tiles_x, binning.tile_size,
                  camera.width, camera.height, background.astype(dtype),
                  settings.alpha_min, settings.alpha_max, settings.early_stop, settings.mode.kernel_code,
                  settings.gradient_mode, record_base, record_stride,
                  color, transmittance, n_contrib, rec_entry, rec_alpha, rec_t, overflow)

    overflow_count = int(overflow.sum())
    if overflow_count:
        logger.warning(LogMessages.CONTRIBUTOR_OVERFLOW.format(settings.max_contributors, overflow_count))
    frame = FrameBuffer(
        color=color,
        final_transmittance=transmittance,
        n_contrib=n_contrib,
        background=background,
        overflow_count=overflow_count,
        splats=splats,
        binning=binning,
        masks=masks,
        slot_masks=slot_masks,
        settings=settings,
    )
    if settings.gradient_mode:
        frame.record_entry = rec_entry
        frame.record_alpha = rec_alpha
        frame.record_transmittance = rec_t
        frame.record_base = record_base
        frame.record_stride = record_stride
    return frame


def render_standard(splats: SplatBatch, camera: Camera, background,
                    settings: Optional[RasterSettings] = None) -> FrameBuffer:
    """Plain 3DGS blending: the masked kernel with every mask at 1."""
    return render_masked(splats, MaskSample.ones(splats.n_source), camera, background, settings)
