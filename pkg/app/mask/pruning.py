import numpy as np
from app.constants.app_constants import AppConstants
from app.mask.sampling import RandomSource, as_generator, existence_prob, sample_gumbel


def prune_never_sampled(mask_logits: np.ndarray, repeats: int = AppConstants.MASK_PRUNE_REPEATS,
                        seed: RandomSource = None) -> np.ndarray:
    """Indices of Gaussians drawn present at least once in `repeats` Gumbel draws."""
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    mask_logits = np.asarray(mask_logits, dtype=np.float64).reshape(-1, 2)
    noise = sample_gumbel(as_generator(seed), (repeats,) + mask_logits.shape)
    perturbed = mask_logits[None] + noise
    sampled = np.any(perturbed[..., 0] > perturbed[..., 1], axis=0)
    return np.flatnonzero(sampled)


def prune_below_threshold(mask_logits: np.ndarray, threshold: float = AppConstants.STE_THRESHOLD) -> np.ndarray:
    """Deterministic rule used with STE masks."""
    return np.flatnonzero(existence_prob(mask_logits) >= threshold)
