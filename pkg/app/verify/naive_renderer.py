"""
Reference renderer: every pixel composites every projected Gaussian in
(depth, index) order. No tiles, no early stop, no contributor cap, float64.
Blending is written here independently of app.raster.
"""
from typing import Any, Optional, Tuple, Union
import numpy as np
from pydantic import BaseModel, ConfigDict
from app.constants.app_constants import AppConstants
from app.enums.raster_mode import RasterMode
from app.gaussian.alpha import alpha_map
from app.gaussian.projection import project_splats
from app.models.camera_model import Camera
from app.models.gaussian_cloud_model import GaussianCloud
from app.models.mask_model import MaskSample
from app.models.raster_model import FrameBuffer


class RenderSignature(BaseModel):
    """Everything piecewise about a render: which branch each cutoff and clamp took."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n_contrib: Any
    clamped_pairs: int
    negative_colors: int

    def matches(self, other: "RenderSignature") -> bool:
        return (self.clamped_pairs == other.clamped_pairs
                and self.negative_colors == other.negative_colors
                and np.array_equal(self.n_contrib, other.n_contrib))


def _mask_values(masks: Union[MaskSample, np.ndarray, None], n: int) -> np.ndarray:
    if masks is None:
        return np.ones(n)
    if isinstance(masks, MaskSample):
        return masks.forward_values.astype(np.float64)
    values = np.asarray(masks, dtype=np.float64).reshape(-1)
    if values.shape[0] != n:
        raise ValueError(f"mask length {values.shape[0]} does not match cloud size {n}")
    return values


def naive_render_with_signature(cloud: GaussianCloud, masks, camera: Camera, background,
                                mode: RasterMode = RasterMode.MASKED_BLEND,
                                alpha_min: float = AppConstants.ALPHA_MIN,
                                alpha_max: float = AppConstants.ALPHA_MAX,
                                cov_floor: float = AppConstants.COV2D_FLOOR,
                                sh_degree: Optional[int] = None) -> Tuple[FrameBuffer, RenderSignature]:
    mask_values = _mask_values(masks, cloud.n)
    background = np.asarray(background, dtype=np.float64).reshape(3)
    xs, ys = camera.pixel_grid()
    height, width = xs.shape

    color = np.zeros((height, width, 3))
    transmittance = np.ones((height, width))
    n_contrib = np.zeros((height, width), dtype=np.int64)
    clamped_pairs = 0

    batch = project_splats(cloud, camera, cov_floor, alpha_min, sh_degree=sh_degree, cull=False)
    order = np.lexsort((batch.source_index, batch.depths))
    for s in order:
        m = mask_values[batch.source_index[s]]
        if mode is RasterMode.MASK_OPACITY:
            opacity, weight = m * batch.opacities[s], 1.0
        else:
            opacity, weight = batch.opacities[s], m
        alpha, raw = alpha_map(batch.means2d[s], batch.conics[s], opacity, xs, ys, alpha_max)
        live = alpha >= alpha_min
        alpha = np.where(live, alpha, 0.0)
        clamped_pairs += int(np.count_nonzero(live & (raw > alpha_max)))
        n_contrib += live
        color += (weight * alpha * transmittance)[..., None] * batch.colors[s]
        transmittance = transmittance * (1.0 - weight * alpha)

    color += transmittance[..., None] * background
    frame = FrameBuffer(color=color, final_transmittance=transmittance, n_contrib=n_contrib,
                        background=background)
    signature = RenderSignature(n_contrib=n_contrib, clamped_pairs=clamped_pairs,
                                negative_colors=int(np.count_nonzero(batch.colors_raw < 0.0)))
    return frame, signature


def naive_render(cloud: GaussianCloud, masks, camera: Camera, background,
                 mode: RasterMode = RasterMode.MASKED_BLEND,
                 alpha_min: float = AppConstants.ALPHA_MIN,
                 alpha_max: float = AppConstants.ALPHA_MAX,
                 cov_floor: float = AppConstants.COV2D_FLOOR,
                 sh_degree: Optional[int] = None) -> FrameBuffer:
    """Masks may be a MaskSample, fractional values in [0, 1], or None (all on)."""
    frame, _ = naive_render_with_signature(cloud, masks, camera, background, mode,
                                           alpha_min, alpha_max, cov_floor, sh_degree)
    return frame
