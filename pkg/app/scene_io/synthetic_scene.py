"""
Desk-scale stand-in for a captured dataset: a random cloud of coloured
anisotropic Gaussians, a ring of cameras around it, and ground-truth
images from the naive renderer.
"""
import logging
from typing import List, Optional
import numpy as np
from scipy.spatial import cKDTree
from app.constants.app_constants import AppConstants
from app.constants.sh_constants import ShConstants
from app.gaussian.covariance import normalize_quaternions
from app.models.camera_model import Camera
from app.models.gaussian_cloud_model import GaussianCloud, inverse_sigmoid, sh_coefficient_count
from app.models.scene_model import SceneConfig, SyntheticScene
from app.verify.naive_renderer import naive_render

logger = logging.getLogger(__name__)

INIT_OPACITY = 0.1


def ring_cameras(config: SceneConfig) -> List[Camera]:
    """Cameras on a ring around the origin, alternating slightly above and below it."""
    cameras = []
    for i in range(config.n_cameras):
        theta = 2.0 * np.pi * i / config.n_cameras
        elevation = 0.35 if i % 2 == 0 else -0.2
        eye = config.camera_radius * np.array([np.cos(elevation) * np.sin(theta),
                                               -np.sin(elevation),
                                               np.cos(elevation) * np.cos(theta)])
        cameras.append(Camera.look_at(eye, np.zeros(3), (0.0, 1.0, 0.0),
                                      config.width, config.height, config.fov_x))
    return cameras


def split_views(n_cameras: int, max_eval_views: int):
    """The last min(max_eval_views, n_cameras // 2) cameras are held out."""
    n_eval = min(max_eval_views, n_cameras // 2)
    train = list(range(n_cameras - n_eval))
    return train, list(range(n_cameras - n_eval, n_cameras))


def random_rotations(rng: np.random.Generator, n: int) -> np.ndarray:
    q, _ = normalize_quaternions(rng.normal(size=(n, 4)))
    return q


def ground_truth_cloud(rng: np.random.Generator, config: SceneConfig,
                       init_logits=AppConstants.MASK_INIT_LOGITS) -> GaussianCloud:
    n = config.n_gaussians
    half = 0.5 * config.extent
    colors = rng.uniform(0.1, 0.9, size=(n, 3))
    sh = np.zeros((n, sh_coefficient_count(config.sh_degree), 3))
    sh[:, 0, :] = (colors - AppConstants.SH_OFFSET) / ShConstants.C0
    if sh.shape[1] > 1:
        sh[:, 1:, :] = rng.normal(0.0, 0.03, size=(n, sh.shape[1] - 1, 3))
    return GaussianCloud(
        centers=rng.uniform(-half, half, size=(n, 3)),
        opacity_logits=inverse_sigmoid(rng.uniform(0.5, 0.9, size=n)),
        log_scales=np.log(rng.uniform(0.04, 0.12, size=(n, 3)) * config.extent),
        rotations=random_rotations(rng, n),
        sh_coeffs=sh,
        mask_logits=np.tile(np.asarray(init_logits, dtype=np.float64), (n, 1)),
    )


def nearest_neighbour_scales(points: np.ndarray, k: int = 3) -> np.ndarray:
    """Log of the RMS distance to the k nearest neighbours, per point."""
    if points.shape[0] < 2:
        return np.zeros((points.shape[0], 3))
    k = min(k, points.shape[0] - 1)
    distances, _ = cKDTree(points).query(points, k=k + 1)
    mean_sq = np.mean(np.square(distances[:, 1:]), axis=1)
    mean_sq = np.maximum(mean_sq, 1e-7)
    return np.repeat(np.log(np.sqrt(mean_sq))[:, None], 3, axis=1)


def initial_cloud(rng: np.random.Generator, config: SceneConfig, sh_degree: int,
                  init_logits=AppConstants.MASK_INIT_LOGITS) -> GaussianCloud:
    """Over-provisioned random start: grey, low opacity, isotropic kNN scales."""
    n = config.n_gaussians * config.overprovision
    half = 0.5 * config.extent
    centers = rng.uniform(-half, half, size=(n, 3))
    sh = np.zeros((n, sh_coefficient_count(sh_degree), 3))
    sh[:, 0, :] = rng.normal(0.0, 0.1, size=(n, 3))
    rotations = np.zeros((n, 4))
    rotations[:, 0] = 1.0
    return GaussianCloud(
        centers=centers,
        opacity_logits=np.full(n, inverse_sigmoid(INIT_OPACITY)),
        log_scales=nearest_neighbour_scales(centers),
        rotations=rotations,
        sh_coeffs=sh,
        mask_logits=np.tile(np.asarray(init_logits, dtype=np.float64), (n, 1)),
    )


def generate_synthetic_scene(seed: Optional[int] = None, n_gaussians: Optional[int] = None,
                             n_cameras: Optional[int] = None, config: Optional[SceneConfig] = None,
                             init_logits=AppConstants.MASK_INIT_LOGITS) -> SyntheticScene:
    """Deterministic for a given config; explicit arguments override the config."""
    config = config or SceneConfig()
    overrides = {key: value for key, value in
                 (("seed", seed), ("n_gaussians", n_gaussians), ("n_cameras", n_cameras)) if value is not None}
    if overrides:
        config = SceneConfig(**{**config.model_dump(), **overrides})

    rng = np.random.default_rng(config.seed)
    cloud = ground_truth_cloud(rng, config, init_logits)
    cameras = ring_cameras(config)
    targets = [naive_render(cloud, None, camera, config.background).color for camera in cameras]
    train, held_out = split_views(config.n_cameras, config.max_eval_views)
    start = initial_cloud(rng, config, config.sh_degree, init_logits)
    logger.info("Synthetic scene: %d Gaussians, %d cameras (%d train / %d eval), start cloud %d",
                cloud.n, len(cameras), len(train), len(held_out), start.n)
    return SyntheticScene(
        cloud=cloud,
        initial_cloud=start,
        cameras=cameras,
        targets=targets,
        train_index=train,
        eval_index=held_out,
        background=config.background,
        extent=config.extent,
    )
