import logging
from typing import Mapping, Optional
import numpy as np
from app.base.exceptions import InvalidArgumentError
from app.constants.app_constants import AppConstants
from app.constants.log_messages import LogMessages
from app.gaussian.projection import backward_projection_chain
from app.models.camera_model import Camera
from app.models.gaussian_cloud_model import GaussianCloud
from app.models.gradient_model import GradientSet
from app.models.raster_model import FrameBuffer
from app.raster.forward import slot_arrays
from app.raster.kernels import backward_pixel_core, backward_tiles

logger = logging.getLogger(__name__)

ENTRY_WIDTH = 10


def backward_pixel(contributors: Mapping[str, np.ndarray], d_color, background,
                   final_transmittance: Optional[float] = None,
                   denom_floor: float = AppConstants.DENOM_FLOOR) -> dict:
    """
    Gradients for one pixel's front-to-back contributors (`alpha`,
    `transmittance`, `mask`, `color`) given dL/dpixel. Masked contributors
    get a mask gradient and zero alpha and color gradients.
    """
    alphas = np.asarray(contributors["alpha"], dtype=np.float64).reshape(-1)
    trans = np.asarray(contributors["transmittance"], dtype=np.float64).reshape(-1)
    masks = np.asarray(contributors["mask"], dtype=np.float64).reshape(-1)
    colors = np.asarray(contributors["color"], dtype=np.float64).reshape(-1, 3)
    n = alphas.shape[0]
    if not (trans.shape[0] == masks.shape[0] == colors.shape[0] == n):
        raise InvalidArgumentError("contributor arrays differ in length")
    if final_transmittance is None:
        final_transmittance = trans[-1] * (1.0 - masks[-1] * alphas[-1]) if n else 1.0
    d_mask = np.zeros(n)
    d_col = np.zeros((n, 3))
    d_alpha = np.zeros(n)
    guarded = backward_pixel_core(alphas, trans, masks, colors,
                                  np.asarray(d_color, dtype=np.float64).reshape(3),
                                  np.asarray(background, dtype=np.float64).reshape(3),
                                  float(final_transmittance), denom_floor, d_mask, d_col, d_alpha)
    return {"mask": d_mask, "color": d_col, "alpha": d_alpha, "guarded": int(guarded)}


def rasterize_backward(frame: FrameBuffer, d_image: np.ndarray, cloud: GaussianCloud,
                       camera: Camera) -> GradientSet:
    """
    Splat-level gradients from the tile kernel, reduced per splat in entry
    order and chained back to the Gaussian parameters.
    """
    if not frame.has_records:
        raise InvalidArgumentError("backward needs a frame rendered with gradient_mode on")
    d_image = np.asarray(d_image, dtype=np.float64)
    if d_image.shape != frame.color.shape:
        raise InvalidArgumentError(f"dL/dimage has shape {d_image.shape}, expected {frame.color.shape}")
    settings = frame.settings
    splats, binning = frame.splats, frame.binning
    dtype = settings.precision.dtype
    arrays = slot_arrays(splats, dtype)

    g_entry = np.zeros((binning.n_entries, ENTRY_WIDTH))
    guarded = np.zeros(binning.n_tiles, dtype=np.int64)
    backward_tiles(arrays["means2d"], arrays["conics"], arrays["colors"], arrays["opacities"],
                   frame.slot_masks, binning.entries, binning.ranges, binning.tiles_x, binning.tile_size,
                   frame.width, frame.height, frame.background.astype(np.float64),
                   settings.alpha_max, settings.denom_floor, settings.mode.kernel_code,
                   frame.record_base, frame.record_stride, frame.record_entry,
                   frame.record_alpha, frame.record_transmittance,
                   frame.final_transmittance, frame.n_contrib, d_image, g_entry, guarded)

    g_slot = np.zeros((splats.n, ENTRY_WIDTH))
    np.add.at(g_slot, binning.entries, g_entry)

    grads = GradientSet.zeros(cloud.n, cloud.sh_coeffs.shape[1])
    grads.d_mask_soft[splats.source_index] = g_slot[:, 0]
    backward_projection_chain(
        d_means2d=g_slot[:, 5:7],
        d_conics=g_slot[:, 7:10],
        d_colors=g_slot[:, 1:4],
        d_opacities=g_slot[:, 4],
        batch=splats,
        cloud=cloud,
        camera=camera,
        sh_degree=settings.sh_degree,
        grads=grads,
    )
    grads.overflow_count = frame.overflow_count
    grads.guarded_count = int(guarded.sum())
    if grads.guarded_count:
        logger.warning(LogMessages.DENOM_GUARDED.format(grads.guarded_count))
    return grads
