from typing import Tuple
import numpy as np
from app.base.exceptions import InvalidArgumentError
from app.constants.app_constants import AppConstants
from app.trainer.metrics import ssim_with_grad


def render_loss_with_grad(rendered: np.ndarray, target: np.ndarray,
                          ssim_weight: float = AppConstants.SSIM_WEIGHT) -> Tuple[float, np.ndarray]:
    """(1 - w) L1 + w (1 - SSIM) and its gradient w.r.t. the rendered image."""
    rendered = np.asarray(rendered, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if rendered.shape != target.shape:
        raise InvalidArgumentError(f"rendered {rendered.shape} and target {target.shape} differ")
    diff = rendered - target
    l1 = float(np.mean(np.abs(diff)))
    grad = (1.0 - ssim_weight) * np.sign(diff) / diff.size
    loss = (1.0 - ssim_weight) * l1
    if ssim_weight > 0.0:
        value, d_ssim = ssim_with_grad(rendered, target)
        loss += ssim_weight * (1.0 - value)
        grad = grad - ssim_weight * d_ssim
    return loss, grad


def render_loss(rendered: np.ndarray, target: np.ndarray,
                ssim_weight: float = AppConstants.SSIM_WEIGHT) -> float:
    loss, _ = render_loss_with_grad(rendered, target, ssim_weight)
    return loss


def total_loss(render_loss_value: float, mask_loss_value: float, lambda_m: float) -> float:
    if lambda_m < 0.0:
        raise ValueError("lambda_m must be non-negative")
    return render_loss_value + lambda_m * mask_loss_value
