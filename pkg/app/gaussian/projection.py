"""
EWA projection of 3D Gaussians to screen-space splats and the reverse
chain from splat-space gradients back to the 3D parameters.
"""
import logging
from typing import Optional
import numpy as np
from app.constants.app_constants import AppConstants
from app.constants.log_messages import LogMessages
from app.gaussian.covariance import build_covariances, covariance_vjp
from app.gaussian.spherical_harmonics import sh_colors, sh_vjp
from app.models.camera_model import Camera
from app.models.gaussian_cloud_model import GaussianCloud
from app.models.gradient_model import GradientSet
from app.models.splat_model import Splat2D, SplatBatch

logger = logging.getLogger(__name__)


def footprint_sigmas(opacities: np.ndarray, alpha_min: float) -> np.ndarray:
    """
    Radius multiplier k so that alpha < alpha_min everywhere beyond k sigma:
    3 sigma, widened to sqrt(2 ln(o / alpha_min)) for opaque splats.
    """
    ratio = np.maximum(opacities / alpha_min, 1.0)
    return np.maximum(AppConstants.FOOTPRINT_SIGMAS, np.sqrt(2.0 * np.log(ratio)))


def projection_jacobians(cam_points: np.ndarray, camera: Camera) -> np.ndarray:
    x, y, z = cam_points[:, 0], cam_points[:, 1], cam_points[:, 2]
    jac = np.zeros((cam_points.shape[0], 2, 3))
    jac[:, 0, 0] = camera.fx / z
    jac[:, 0, 2] = -camera.fx * x / (z * z)
    jac[:, 1, 1] = camera.fy / z
    jac[:, 1, 2] = -camera.fy * y / (z * z)
    return jac


def project_splats(cloud: GaussianCloud, camera: Camera,
                   cov_floor: float = AppConstants.COV2D_FLOOR,
                   alpha_min: float = AppConstants.ALPHA_MIN,
                   sh_degree: Optional[int] = None, cull: bool = True) -> SplatBatch:
    """
    Project every Gaussian in front of the near plane. With `cull` the
    splats whose footprint misses the image are dropped as well.
    """
    degree = cloud.sh_degree if sh_degree is None else min(sh_degree, cloud.sh_degree)
    cam_points = camera.to_camera(cloud.centers)
    opacities = cloud.opacity()
    in_front = cam_points[:, 2] > camera.near_clip
    candidate = np.flatnonzero(in_front & (opacities > alpha_min))

    pts = cam_points[candidate]
    cov3d = build_covariances(cloud.rotations[candidate], cloud.log_scales[candidate])
    jac = projection_jacobians(pts, camera)
    tjac = jac @ camera.rotation
    cov2d_full = tjac @ cov3d @ np.transpose(tjac, (0, 2, 1))
    cov2d = np.stack([cov2d_full[:, 0, 0] + cov_floor,
                      0.5 * (cov2d_full[:, 0, 1] + cov2d_full[:, 1, 0]),
                      cov2d_full[:, 1, 1] + cov_floor], axis=1)
    det = cov2d[:, 0] * cov2d[:, 2] - cov2d[:, 1] ** 2
    nonsingular = np.isfinite(det) & (det > 0.0)
    skipped_singular = int(np.count_nonzero(~nonsingular))
    if skipped_singular:
        logger.warning(LogMessages.SKIPPED_SINGULAR.format(skipped_singular))
    safe_det = np.where(nonsingular, det, 1.0)
    conics = np.stack([cov2d[:, 2], -cov2d[:, 1], cov2d[:, 0]], axis=1) / safe_det[:, None]

    z = pts[:, 2]
    means2d = np.stack([camera.fx * pts[:, 0] / z + camera.cx,
                        camera.fy * pts[:, 1] / z + camera.cy], axis=1)
    mid = 0.5 * (cov2d[:, 0] + cov2d[:, 2])
    lambda_max = mid + np.sqrt(np.maximum(mid * mid - np.where(nonsingular, det, 0.0), 0.0))
    radii = np.ceil(footprint_sigmas(opacities[candidate], alpha_min) * np.sqrt(lambda_max))

    x_lo = np.ceil(means2d[:, 0] - radii)
    x_hi = np.floor(means2d[:, 0] + radii)
    y_lo = np.ceil(means2d[:, 1] - radii)
    y_hi = np.floor(means2d[:, 1] + radii)
    on_image = ((x_hi >= 0) & (x_lo <= camera.width - 1)
                & (y_hi >= 0) & (y_lo <= camera.height - 1) & (x_lo <= x_hi) & (y_lo <= y_hi))
    keep = nonsingular & on_image if cull else nonsingular

    index = candidate[keep]
    view_dirs = cloud.centers[index] - camera.center
    colors, colors_raw = sh_colors(cloud.sh_coeffs[index], view_dirs, degree)
    return SplatBatch(
        means2d=means2d[keep],
        conics=conics[keep],
        cov2d=cov2d[keep],
        depths=z[keep],
        colors=colors,
        colors_raw=colors_raw,
        opacities=opacities[index],
        radii=radii[keep],
        source_index=index,
        cam_points=pts[keep],
        view_dirs=view_dirs,
        cov3d=cov3d[keep],
        jacobians=jac[keep],
        width=camera.width,
        height=camera.height,
        skipped_singular=skipped_singular,
        n_source=cloud.n,
    )


def project_splat(gaussian_index: int, cloud: GaussianCloud, camera: Camera,
                  cov_floor: float = AppConstants.COV2D_FLOOR,
                  alpha_min: float = AppConstants.ALPHA_MIN) -> Optional[Splat2D]:
    """Single-Gaussian projection; None when clipped, invisible, off-image or singular."""
    batch = project_splats(cloud.subset([gaussian_index]), camera, cov_floor, alpha_min)
    if batch.n == 0:
        return None
    splat = batch.splat(0)
    splat.source_index = gaussian_index
    return splat


def backward_projection_chain(d_means2d: np.ndarray, d_conics: np.ndarray, d_colors: np.ndarray,
                              d_opacities: np.ndarray, batch: SplatBatch, cloud: GaussianCloud,
                              camera: Camera, sh_degree: Optional[int] = None,
                              grads: Optional[GradientSet] = None) -> GradientSet:
    """
    Accumulate splat-space gradients into per-Gaussian parameter gradients.

    d_conics holds gradients w.r.t. the (a, b, c) entries of the symmetric
    conic [[a, b], [b, c]]; d_opacities is w.r.t. the activated opacity.
    """
    if grads is None:
        grads = GradientSet.zeros(cloud.n, cloud.sh_coeffs.shape[1])
    if batch.n == 0:
        return grads
    degree = cloud.sh_degree if sh_degree is None else min(sh_degree, cloud.sh_degree)
    index = batch.source_index

    conic = np.empty((batch.n, 2, 2))
    conic[:, 0, 0] = batch.conics[:, 0]
    conic[:, 0, 1] = conic[:, 1, 0] = batch.conics[:, 1]
    conic[:, 1, 1] = batch.conics[:, 2]
    g_conic = np.empty_like(conic)
    g_conic[:, 0, 0] = d_conics[:, 0]
    g_conic[:, 0, 1] = g_conic[:, 1, 0] = 0.5 * d_conics[:, 1]
    g_conic[:, 1, 1] = d_conics[:, 2]
    d_cov2d = -conic @ g_conic @ conic

    tjac = batch.jacobians @ camera.rotation
    d_cov3d = np.transpose(tjac, (0, 2, 1)) @ d_cov2d @ tjac
    d_tjac = 2.0 * d_cov2d @ tjac @ batch.cov3d
    d_jac = d_tjac @ camera.rotation.T

    x, y, z = batch.cam_points[:, 0], batch.cam_points[:, 1], batch.cam_points[:, 2]
    fx, fy = camera.fx, camera.fy
    d_cam = np.zeros((batch.n, 3))
    d_cam[:, 0] = d_jac[:, 0, 2] * (-fx / (z * z)) + d_means2d[:, 0] * fx / z
    d_cam[:, 1] = d_jac[:, 1, 2] * (-fy / (z * z)) + d_means2d[:, 1] * fy / z
    d_cam[:, 2] = (d_jac[:, 0, 0] * (-fx / (z * z)) + d_jac[:, 0, 2] * (2.0 * fx * x / z ** 3)
                   + d_jac[:, 1, 1] * (-fy / (z * z)) + d_jac[:, 1, 2] * (2.0 * fy * y / z ** 3)
                   - d_means2d[:, 0] * fx * x / (z * z) - d_means2d[:, 1] * fy * y / (z * z))
    d_centers = d_cam @ camera.rotation

    d_sh, d_dirs = sh_vjp(cloud.sh_coeffs[index], batch.view_dirs, degree, batch.colors_raw, d_colors)
    d_centers += d_dirs

    d_rotations, d_log_scales = covariance_vjp(cloud.rotations[index], cloud.log_scales[index], d_cov3d)
    opacity = batch.opacities

    grads.d_centers[index] += d_centers
    grads.d_rotations[index] += d_rotations
    grads.d_log_scales[index] += d_log_scales
    grads.d_sh[index] += d_sh
    grads.d_opacity_logits[index] += d_opacities * opacity * (1.0 - opacity)
    screen = d_means2d * np.array([0.5 * camera.width, 0.5 * camera.height])
    grads.d_screen_norm[index] += np.linalg.norm(screen, axis=1)
    grads.visible[index] = True
    return grads
