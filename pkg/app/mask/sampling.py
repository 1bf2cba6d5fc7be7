"""
Existence probabilities and mask sampling. Each Gaussian carries two
logits (z_present, z_absent); the present probability is their softmax.
"""
from typing import Union
import numpy as np
from scipy.special import expit
from app.constants.app_constants import AppConstants
from app.enums.mask_mode import MaskMode
from app.models.mask_model import MaskConfig, MaskSample

RandomSource = Union[int, np.random.Generator, None]


def as_generator(seed: RandomSource) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def existence_prob(mask_logits: np.ndarray) -> np.ndarray:
    mask_logits = np.asarray(mask_logits, dtype=np.float64).reshape(-1, 2)
    return expit(mask_logits[:, 0] - mask_logits[:, 1])


def sample_gumbel(rng: np.random.Generator, shape, eps: float = AppConstants.GUMBEL_EPS) -> np.ndarray:
    u = rng.random(shape)
    return -np.log(-np.log(u + eps) + eps)


def sample_masks(mask_logits: np.ndarray, temperature: float = AppConstants.MASK_TEMPERATURE,
                 seed: RandomSource = None) -> MaskSample:
    """Straight-through Gumbel-Softmax: hard argmax forward, tempered softmax backward."""
    if temperature <= 0.0:
        raise ValueError("temperature must be positive")
    mask_logits = np.asarray(mask_logits, dtype=np.float64).reshape(-1, 2)
    noise = sample_gumbel(as_generator(seed), mask_logits.shape)
    perturbed = mask_logits + noise
    gap = perturbed[:, 0] - perturbed[:, 1]
    soft = expit(gap / temperature)
    return MaskSample(
        hard=(gap > 0.0).astype(np.float64),
        soft=soft,
        soft_slope=soft * (1.0 - soft) / temperature,
        mode=MaskMode.GUMBEL,
    )


def ste_masks(mask_logits: np.ndarray, threshold: float = AppConstants.STE_THRESHOLD) -> MaskSample:
    """Deterministic masks; ties at the threshold keep the Gaussian."""
    prob = existence_prob(mask_logits)
    return MaskSample(
        hard=(prob >= threshold).astype(np.float64),
        soft=prob,
        soft_slope=prob * (1.0 - prob),
        mode=MaskMode.STE,
    )


def draw_masks(mask_logits: np.ndarray, config: MaskConfig, rng: RandomSource = None) -> MaskSample:
    if config.mode is MaskMode.GUMBEL:
        return sample_masks(mask_logits, config.temperature, rng)
    if config.mode is MaskMode.STE:
        return ste_masks(mask_logits, config.ste_threshold)
    return MaskSample.ones(np.asarray(mask_logits).shape[0])


def mask_logit_grads(sample: MaskSample, d_soft: np.ndarray) -> np.ndarray:
    """Chain dL/dsoft into (z_present, z_absent)."""
    d_gap = np.asarray(d_soft, dtype=np.float64) * sample.soft_slope
    return np.stack([d_gap, -d_gap], axis=1)
