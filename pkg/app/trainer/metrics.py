"""
PSNR and 11x11 Gaussian-window SSIM on [0, 1] images (H x W x 3), with
the SSIM gradient used by the D-SSIM term of the render loss.
"""
from typing import Tuple
import numpy as np
from scipy.ndimage import correlate1d
from app.base.exceptions import InvalidArgumentError
from app.constants.app_constants import AppConstants


def _check_pair(img_a: np.ndarray, img_b: np.ndarray) -> None:
    if img_a.shape != img_b.shape:
        raise InvalidArgumentError(f"image shapes differ: {img_a.shape} vs {img_b.shape}")


def psnr(img_a: np.ndarray, img_b: np.ndarray) -> float:
    """10 log10(1 / MSE); +inf for identical images."""
    img_a = np.asarray(img_a, dtype=np.float64)
    img_b = np.asarray(img_b, dtype=np.float64)
    _check_pair(img_a, img_b)
    mse = float(np.mean((img_a - img_b) ** 2))
    if mse == 0.0:
        return float("inf")
    return float(10.0 * np.log10(1.0 / mse))


def gaussian_window(size: int = AppConstants.SSIM_WINDOW, sigma: float = AppConstants.SSIM_SIGMA) -> np.ndarray:
    x = np.arange(size, dtype=np.float64) - size // 2
    window = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return window / window.sum()


def _blur(image: np.ndarray, window: np.ndarray) -> np.ndarray:
    """Separable zero-padded filter over the two spatial axes; self-adjoint."""
    out = correlate1d(image, window, axis=0, mode="constant", cval=0.0)
    return correlate1d(out, window, axis=1, mode="constant", cval=0.0)


def ssim_with_grad(img_a: np.ndarray, img_b: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean SSIM and its gradient w.r.t. img_a."""
    x = np.asarray(img_a, dtype=np.float64)
    y = np.asarray(img_b, dtype=np.float64)
    _check_pair(x, y)
    window = gaussian_window()
    c1 = AppConstants.SSIM_K1 ** 2
    c2 = AppConstants.SSIM_K2 ** 2

    mu_x = _blur(x, window)
    mu_y = _blur(y, window)
    sigma_xx = _blur(x * x, window) - mu_x * mu_x
    sigma_yy = _blur(y * y, window) - mu_y * mu_y
    sigma_xy = _blur(x * y, window) - mu_x * mu_y

    a1 = 2.0 * mu_x * mu_y + c1
    a2 = 2.0 * sigma_xy + c2
    b1 = mu_x * mu_x + mu_y * mu_y + c1
    b2 = sigma_xx + sigma_yy + c2
    ssim_map = (a1 * a2) / (b1 * b2)
    scale = 1.0 / ssim_map.size

    d_mu_x = (2.0 * mu_y * (a2 - a1) / (b1 * b2)
              - ssim_map * (2.0 * mu_x / b1 - 2.0 * mu_x / b2)) * scale
    d_xx = -ssim_map / b2 * scale
    d_xy = 2.0 * a1 / (b1 * b2) * scale
    grad = _blur(d_mu_x, window) + 2.0 * x * _blur(d_xx, window) + y * _blur(d_xy, window)
    return float(np.mean(ssim_map)), grad


def ssim(img_a: np.ndarray, img_b: np.ndarray) -> float:
    value, _ = ssim_with_grad(img_a, img_b)
    return value
