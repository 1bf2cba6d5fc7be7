import logging
from typing import Optional
import numpy as np
from app.constants.log_messages import LogMessages
from app.gaussian.projection import project_splats
from app.models.camera_model import Camera
from app.models.gaussian_cloud_model import GaussianCloud
from app.models.gradient_model import GradientSet
from app.models.mask_model import MaskSample
from app.models.raster_model import FrameBuffer, RasterSettings
from app.models.splat_model import SplatBatch
from app.raster.backward import rasterize_backward
from app.raster.forward import render_masked, render_standard


class Rasterizer:
    """Projection, tiled forward and tiled backward under one RasterSettings."""

    def __init__(self, settings: Optional[RasterSettings] = None) -> None:
        self.settings = settings or RasterSettings()

    def project(self, cloud: GaussianCloud, camera: Camera) -> SplatBatch:
        return project_splats(cloud, camera, cov_floor=self.settings.cov_floor,
                              alpha_min=self.settings.alpha_min, sh_degree=self.settings.sh_degree)

    def render_masked(self, splats: SplatBatch, masks: MaskSample, camera: Camera, background) -> FrameBuffer:
        return render_masked(splats, masks, camera, background, self.settings)

    def render_standard(self, splats: SplatBatch, camera: Camera, background) -> FrameBuffer:
        return render_standard(splats, camera, background, self.settings)

    def render(self, cloud: GaussianCloud, camera: Camera, background,
               masks: Optional[MaskSample] = None) -> FrameBuffer:
        splats = self.project(cloud, camera)
        if masks is None:
            return self.render_standard(splats, camera, background)
        return self.render_masked(splats, masks, camera, background)

    def backward(self, frame: FrameBuffer, d_image: np.ndarray, cloud: GaussianCloud,
                 camera: Camera) -> GradientSet:
        return rasterize_backward(frame, d_image, cloud, camera)

    def warmup(self) -> None:
        """Compile the kernels on a one-Gaussian scene."""
        logging.info(LogMessages.JIT_WARMUP)
        cloud = GaussianCloud(
            centers=[[0.0, 0.0, 0.0]], opacity_logits=[0.0], log_scales=[[-1.0, -1.0, -1.0]],
            rotations=[[1.0, 0.0, 0.0, 0.0]], sh_coeffs=np.zeros((1, 1, 3)), mask_logits=[[3.0, 0.0]],
        )
        camera = Camera.look_at([0.0, 0.0, -3.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0], 8, 8, 1.0)
        frame = self.render(cloud, camera, np.zeros(3), MaskSample.ones(1))
        if self.settings.gradient_mode:
            self.backward(frame, np.ones_like(frame.color, dtype=np.float64), cloud, camera)
