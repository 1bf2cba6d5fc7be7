"""
Per-pixel density alpha = o * exp(-1/2 d^T conic d), d = pixel - mean2d,
clamped at ALPHA_MAX. The scalar helpers are numba-compiled so the tile
kernels call the exact same arithmetic.
"""
from typing import Tuple
import numpy as np
from numba import njit
from app.constants.app_constants import AppConstants
from app.models.gaussian_cloud_model import sigmoid
from app.models.splat_model import Splat2D


@njit(cache=True, inline="always")
def gaussian_power(dx, dy, a, b, c):
    return -0.5 * (a * dx * dx + c * dy * dy) - b * dx * dy


@njit(cache=True)
def alpha_at(px, py, mx, my, a, b, c, opacity, alpha_max):
    """Returns (alpha, falloff, clamped)."""
    dx = px - mx
    dy = py - my
    power = gaussian_power(dx, dy, a, b, c)
    if power > 0.0:
        return 0.0, 0.0, False
    falloff = np.exp(power)
    alpha = opacity * falloff
    if alpha > alpha_max:
        return alpha_max, falloff, True
    return alpha, falloff, False


@njit(cache=True)
def alpha_vjp(d_alpha, px, py, mx, my, a, b, c, alpha, falloff, out):
    """
    Accumulates into out = [d_opacity, d_mx, d_my, d_a, d_b, d_c] for an
    unclamped alpha. d_alpha/d_mean = alpha * conic * d.
    """
    dx = px - mx
    dy = py - my
    out[0] += d_alpha * falloff
    out[1] += d_alpha * alpha * (a * dx + b * dy)
    out[2] += d_alpha * alpha * (b * dx + c * dy)
    out[3] += -0.5 * d_alpha * alpha * dx * dx
    out[4] += -d_alpha * alpha * dx * dy
    out[5] += -0.5 * d_alpha * alpha * dy * dy


def eval_alpha(splat: Splat2D, pixel, alpha_max: float = AppConstants.ALPHA_MAX) -> float:
    pixel = np.asarray(pixel, dtype=np.float64)
    a, b, c = splat.conic
    alpha, _, _ = alpha_at(pixel[0], pixel[1], splat.mean2d[0], splat.mean2d[1],
                           a, b, c, splat.opacity, alpha_max)
    return float(alpha)


def alpha_map(mean2d, conic, opacity: float, xs: np.ndarray, ys: np.ndarray,
              alpha_max: float = AppConstants.ALPHA_MAX) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized alpha over a pixel grid; returns (alpha, unclamped o*G)."""
    a, b, c = conic
    dx = xs - mean2d[0]
    dy = ys - mean2d[1]
    power = -0.5 * (a * dx * dx + c * dy * dy) - b * dx * dy
    raw = np.where(power > 0.0, 0.0, opacity * np.exp(np.minimum(power, 0.0)))
    return np.minimum(raw, alpha_max), raw


def backward_alpha_chain(d_alpha: float, splat: Splat2D, pixel, opacity_logit: float = None,
                         alpha_max: float = AppConstants.ALPHA_MAX) -> dict:
    """
    Gradients of a scalar loss w.r.t. the opacity logit, mean2d and the full
    2x2 cov2d_inv, given dL/dalpha at one pixel. All zero where the clamp is active.
    """
    pixel = np.asarray(pixel, dtype=np.float64)
    a, b, c = splat.conic
    mx, my = splat.mean2d
    alpha, falloff, clamped = alpha_at(pixel[0], pixel[1], mx, my, a, b, c, splat.opacity, alpha_max)
    out = np.zeros(6)
    if not clamped:
        alpha_vjp(d_alpha, pixel[0], pixel[1], mx, my, a, b, c, alpha, falloff, out)
    opacity = splat.opacity if opacity_logit is None else float(sigmoid(opacity_logit))
    return {
        "opacity_logit": out[0] * opacity * (1.0 - opacity),
        "opacity": out[0],
        "mean2d": out[1:3].copy(),
        "cov2d_inv": np.array([[out[3], 0.5 * out[4]], [0.5 * out[4], out[5]]]),
    }
