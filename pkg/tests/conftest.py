from typing import Optional, Sequence
import numpy as np
import pytest
from app.base.config_loader import load_config
from app.constants.app_constants import AppConstants
from app.constants.sh_constants import ShConstants
from app.gaussian.projection import footprint_sigmas
from app.models.camera_model import Camera
from app.models.config_model import AppConfig
from app.models.gaussian_cloud_model import GaussianCloud, inverse_sigmoid
from app.models.splat_model import SplatBatch


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow acceptance tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def front_camera(width: int = 9, height: int = 9, fov_x: float = 0.9) -> Camera:
    """Looks at the origin from z = -3; the origin lands on pixel ((W-1)/2, (H-1)/2)."""
    return Camera.look_at([0.0, 0.0, -3.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0], width, height, fov_x)


def make_cloud(centers, opacities, colors, scales=0.05, sh_degree: int = 0, mask_logits=None) -> GaussianCloud:
    """Isotropic Gaussians whose degree-0 colour is exactly `colors`."""
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    n = centers.shape[0]
    colors = np.broadcast_to(np.asarray(colors, dtype=np.float64), (n, 3))
    sh = np.zeros((n, (sh_degree + 1) ** 2, 3))
    sh[:, 0, :] = (colors - AppConstants.SH_OFFSET) / ShConstants.C0
    if mask_logits is None:
        mask_logits = np.tile(AppConstants.MASK_INIT_LOGITS, (n, 1))
    return GaussianCloud(
        centers=centers,
        opacity_logits=inverse_sigmoid(np.broadcast_to(np.asarray(opacities, dtype=np.float64), (n,))),
        log_scales=np.log(np.broadcast_to(np.asarray(scales, dtype=np.float64), (n,)))[:, None].repeat(3, axis=1),
        rotations=np.tile([1.0, 0.0, 0.0, 0.0], (n, 1)),
        sh_coeffs=sh,
        mask_logits=mask_logits,
    )


def make_splats(means2d, colors, opacities, depths=None, cov2d=(1.0, 0.0, 1.0), width: int = 16,
                height: int = 16, source_index: Optional[Sequence[int]] = None) -> SplatBatch:
    """Screen-space splats built directly, bypassing projection."""
    means2d = np.atleast_2d(np.asarray(means2d, dtype=np.float64))
    n = means2d.shape[0]
    opacities = np.broadcast_to(np.asarray(opacities, dtype=np.float64), (n,)).copy()
    colors = np.broadcast_to(np.asarray(colors, dtype=np.float64), (n, 3)).copy()
    depths = np.arange(1.0, n + 1.0) if depths is None else np.asarray(depths, dtype=np.float64)
    cov = np.tile(np.asarray(cov2d, dtype=np.float64), (n, 1))
    det = cov[:, 0] * cov[:, 2] - cov[:, 1] ** 2
    conics = np.stack([cov[:, 2], -cov[:, 1], cov[:, 0]], axis=1) / det[:, None]
    mid = 0.5 * (cov[:, 0] + cov[:, 2])
    lambda_max = mid + np.sqrt(np.maximum(mid * mid - det, 0.0))
    radii = np.ceil(footprint_sigmas(opacities, AppConstants.ALPHA_MIN) * np.sqrt(lambda_max))
    source = np.arange(n) if source_index is None else np.asarray(source_index, dtype=np.int64)
    return SplatBatch(
        means2d=means2d, conics=conics, cov2d=cov, depths=depths, colors=colors, colors_raw=colors.copy(),
        opacities=opacities, radii=radii, source_index=source, cam_points=np.zeros((n, 3)),
        view_dirs=np.zeros((n, 3)), cov3d=np.zeros((n, 3, 3)), jacobians=np.zeros((n, 2, 3)),
        width=width, height=height, n_source=int(source.max()) + 1 if n else 0,
    )


def small_config(overrides: Optional[dict] = None) -> AppConfig:
    """A tiny synthetic scene and short schedule, quiet progress bar."""
    values = {
        "scene.n_gaussians": 8,
        "scene.n_cameras": 4,
        "scene.width": 24,
        "scene.height": 24,
        "scene.sh_degree": 1,
        "train.iterations": 40,
        "train.progress": "false",
        "train.eval_interval": 20,
        "train.checkpoint_interval": 0,
        "train.sh_increase_interval": 20,
        "train.densify.start": 10,
        "train.densify.interval": 10,
        "train.densify.stop": 30,
        "train.densify.opacity_reset_interval": 0,
    }
    values.update(overrides or {})
    return load_config(None, values)


@pytest.fixture
def camera():
    return front_camera()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
