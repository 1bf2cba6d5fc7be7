from typing import Any
import numpy as np
from pydantic import BaseModel, ConfigDict
from app.constants.sh_constants import ShConstants
from app.constants.app_constants import AppConstants
from app.models.camera_model import Camera
from app.models.gaussian_cloud_model import GaussianCloud, inverse_sigmoid, sh_coefficient_count
from app.utils.checksum import array_checksum

MASK_LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0)


class VerificationScene(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    cloud: GaussianCloud
    camera: Camera
    background: Any
    masks: Any
    weights: Any

    def descriptor_hash(self) -> str:
        arrays = list(self.cloud.arrays().values())
        return array_checksum(arrays + [self.camera.world_to_camera, self.background, self.masks, self.weights])


def random_verification_scene(rng: np.random.Generator, max_gaussians: int = 64, width: int = 32,
                              height: int = 32, sh_degree: int = AppConstants.MAX_SH_DEGREE) -> VerificationScene:
    """
    Small seeded scene in front of a fixed camera. Opacities stay below 0.9
    and colours above 0.1 so the alpha and colour clamps are rarely active.
    """
    n = int(rng.integers(max(1, max_gaussians // 4), max_gaussians + 1))
    centers = np.column_stack([rng.uniform(-0.6, 0.6, n), rng.uniform(-0.6, 0.6, n), rng.uniform(-0.5, 0.5, n)])
    colors = rng.uniform(0.2, 0.8, size=(n, 3))
    sh = np.zeros((n, sh_coefficient_count(sh_degree), 3))
    sh[:, 0, :] = (colors - AppConstants.SH_OFFSET) / ShConstants.C0
    if sh.shape[1] > 1:
        sh[:, 1:, :] = rng.uniform(-0.02, 0.02, size=(n, sh.shape[1] - 1, 3))
    rotations = rng.normal(size=(n, 4))
    rotations /= np.linalg.norm(rotations, axis=1, keepdims=True)
    cloud = GaussianCloud(
        centers=centers,
        opacity_logits=inverse_sigmoid(rng.uniform(0.3, 0.9, size=n)),
        log_scales=np.log(rng.uniform(0.06, 0.25, size=(n, 3))),
        rotations=rotations,
        sh_coeffs=sh,
        mask_logits=np.tile(np.asarray(AppConstants.MASK_INIT_LOGITS), (n, 1)),
    )
    camera = Camera.look_at([0.0, 0.0, -3.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0], width, height, 0.9)
    return VerificationScene(
        cloud=cloud,
        camera=camera,
        background=rng.uniform(0.0, 1.0, size=3),
        masks=rng.choice(MASK_LEVELS, size=n),
        weights=rng.uniform(-1.0, 1.0, size=(height, width, 3)),
    )


def weighted_sum(image: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sum(weights * image))
