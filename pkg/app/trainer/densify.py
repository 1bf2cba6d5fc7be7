"""
3DGS-style adaptive density control: clone small Gaussians and split large
ones where the accumulated screen-space positional gradient is high, prune
transparent or oversized ones, and periodically reset opacity.
"""
import logging
from typing import Tuple
import numpy as np
from app.constants.log_messages import LogMessages
from app.gaussian.covariance import normalize_quaternions, quaternion_to_rotation
from app.models.gaussian_cloud_model import GaussianCloud, inverse_sigmoid
from app.models.gradient_model import GradientSet
from app.models.splat_model import SplatBatch
from app.models.train_model import DensifyConfig


class DensifyStats:
    def __init__(self, n: int) -> None:
        self.reset(n)

    def reset(self, n: int) -> None:
        self.grad_accum = np.zeros(n)
        self.denom = np.zeros(n)
        self.max_radii = np.zeros(n)

    def accumulate(self, grads: GradientSet, batch: SplatBatch) -> None:
        visible = grads.visible
        self.grad_accum[visible] += grads.d_screen_norm[visible]
        self.denom[visible] += 1.0
        index = batch.source_index
        self.max_radii[index] = np.maximum(self.max_radii[index], batch.radii)

    def mean_grads(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            grads = self.grad_accum / self.denom
        return np.nan_to_num(grads, nan=0.0, posinf=0.0)

    def select(self, keep: np.ndarray) -> None:
        self.grad_accum = self.grad_accum[keep]
        self.denom = self.denom[keep]
        self.max_radii = self.max_radii[keep]


def densify(cloud: GaussianCloud, grad_stats: np.ndarray, config: DensifyConfig, extent: float,
            rng: np.random.Generator) -> Tuple[GaussianCloud, np.ndarray, int, int]:
    """
    Returns (new cloud, index of surviving originals, clone count, split count).
    Survivors come first in their original order, then clones, then split
    children; children inherit every parameter including mask logits.
    """
    grad_stats = np.asarray(grad_stats, dtype=np.float64)
    selected = grad_stats >= config.grad_threshold
    max_scale = np.max(cloud.scales(), axis=1) if cloud.n else np.zeros(0)
    small = max_scale <= config.scale_threshold * extent
    clone = np.flatnonzero(selected & small)
    split = np.flatnonzero(selected & ~small)
    if clone.size == 0 and split.size == 0:
        return cloud, np.arange(cloud.n), 0, 0

    clones = cloud.subset(clone)
    children = cloud.subset(np.repeat(split, 2))
    if split.size:
        scales = np.exp(children.log_scales)
        q, _ = normalize_quaternions(children.rotations)
        rot = quaternion_to_rotation(q)
        offsets = rng.normal(0.0, 1.0, size=(children.n, 3)) * scales
        children.centers = children.centers + np.einsum("nij,nj->ni", rot, offsets)
        children.log_scales = children.log_scales - np.log(config.split_factor)

    survivors = np.setdiff1d(np.arange(cloud.n), split)
    result = cloud.subset(survivors).concat(clones).concat(children)
    logging.info(LogMessages.DENSIFIED.format(cloud.n, result.n, clone.size, split.size))
    return result, survivors, int(clone.size), int(split.size)


def prune_mask(cloud: GaussianCloud, max_radii: np.ndarray, config: DensifyConfig, extent: float,
               check_size: bool) -> np.ndarray:
    """True where a Gaussian should be removed."""
    remove = cloud.opacity() < config.min_opacity
    if check_size:
        remove |= max_radii > config.max_screen_radius
        remove |= np.max(cloud.scales(), axis=1) > config.max_world_scale * extent
    return remove


def reset_opacity(cloud: GaussianCloud, value: float) -> None:
    capped = np.minimum(cloud.opacity(), value)
    cloud.opacity_logits[:] = inverse_sigmoid(capped)
