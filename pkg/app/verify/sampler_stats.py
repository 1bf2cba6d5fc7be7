import numpy as np
from app.constants.app_constants import AppConstants
from app.mask.sampling import as_generator, existence_prob, sample_gumbel
from app.models.verify_model import SamplerEntry, SamplerStatsReport

CHUNK = 10000


def present_counts(mask_logits: np.ndarray, draws: int, rng: np.random.Generator) -> np.ndarray:
    """How often each Gaussian's Gumbel argmax picks `present` over `draws` samples."""
    counts = np.zeros(mask_logits.shape[0], dtype=np.int64)
    remaining = draws
    while remaining > 0:
        size = min(CHUNK, remaining)
        perturbed = mask_logits[None] + sample_gumbel(rng, (size,) + mask_logits.shape)
        counts += np.count_nonzero(perturbed[..., 0] > perturbed[..., 1], axis=0)
        remaining -= size
    return counts


def sampler_stats(mask_logits, temperature: float = AppConstants.MASK_TEMPERATURE, draws: int = 100000,
                  seed: int = 0, z_limit: float = AppConstants.SAMPLER_Z_LIMIT) -> SamplerStatsReport:
    """
    Empirical present-frequency per Gaussian against existence_prob. The
    temperature shapes only the soft relaxation, so the hard frequencies
    must match the softmax probabilities at any temperature.
    """
    if draws < AppConstants.SAMPLER_MIN_DRAWS:
        raise ValueError(f"sampler_stats needs at least {AppConstants.SAMPLER_MIN_DRAWS} draws")
    if temperature <= 0.0:
        raise ValueError("temperature must be positive")
    mask_logits = np.asarray(mask_logits, dtype=np.float64).reshape(-1, 2)
    prob = existence_prob(mask_logits)
    frequency = present_counts(mask_logits, draws, as_generator(seed)) / draws

    variance = prob * (1.0 - prob) / draws
    with np.errstate(divide="ignore", invalid="ignore"):
        z = (frequency - prob) / np.sqrt(variance)
    z = np.where(variance > 0.0, z, np.where(frequency == prob, 0.0, np.inf))

    entries = [SamplerEntry(logit_gap=float(logits[0] - logits[1]), existence_prob=float(p),
                            frequency=float(f), z_score=float(score), passed=bool(abs(score) < z_limit))
               for logits, p, f, score in zip(mask_logits, prob, frequency, z)]
    return SamplerStatsReport(seed=seed, draws=draws, temperature=temperature, z_limit=z_limit,
                              entries=entries, passed=all(entry.passed for entry in entries))
