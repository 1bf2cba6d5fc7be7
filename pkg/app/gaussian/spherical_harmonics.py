"""
Real spherical-harmonics color up to degree 3 with the 0.5 offset convention.
"""
from typing import Tuple
import numpy as np
from app.constants.app_constants import AppConstants
from app.constants.sh_constants import ShConstants


def sh_basis(dirs: np.ndarray, degree: int) -> Tuple[np.ndarray, np.ndarray]:
    """Basis values (N, K) and their gradients w.r.t. the unit direction (N, K, 3)."""
    x, y, z = dirs[:, 0], dirs[:, 1], dirs[:, 2]
    n = dirs.shape[0]
    k = (degree + 1) ** 2
    basis = np.zeros((n, k))
    grad = np.zeros((n, k, 3))
    basis[:, 0] = ShConstants.C0
    if degree < 1:
        return basis, grad

    c1 = ShConstants.C1
    basis[:, 1] = -c1 * y
    basis[:, 2] = c1 * z
    basis[:, 3] = -c1 * x
    grad[:, 1, 1] = -c1
    grad[:, 2, 2] = c1
    grad[:, 3, 0] = -c1
    if degree < 2:
        return basis, grad

    c2 = ShConstants.C2
    xx, yy, zz = x * x, y * y, z * z
    basis[:, 4] = c2[0] * x * y
    basis[:, 5] = c2[1] * y * z
    basis[:, 6] = c2[2] * (2.0 * zz - xx - yy)
    basis[:, 7] = c2[3] * x * z
    basis[:, 8] = c2[4] * (xx - yy)
    grad[:, 4] = np.stack([c2[0] * y, c2[0] * x, 0.0 * x], axis=1)
    grad[:, 5] = np.stack([0.0 * x, c2[1] * z, c2[1] * y], axis=1)
    grad[:, 6] = np.stack([-2.0 * c2[2] * x, -2.0 * c2[2] * y, 4.0 * c2[2] * z], axis=1)
    grad[:, 7] = np.stack([c2[3] * z, 0.0 * x, c2[3] * x], axis=1)
    grad[:, 8] = np.stack([2.0 * c2[4] * x, -2.0 * c2[4] * y, 0.0 * x], axis=1)
    if degree < 3:
        return basis, grad

    c3 = ShConstants.C3
    basis[:, 9] = c3[0] * y * (3.0 * xx - yy)
    basis[:, 10] = c3[1] * x * y * z
    basis[:, 11] = c3[2] * y * (4.0 * zz - xx - yy)
    basis[:, 12] = c3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy)
    basis[:, 13] = c3[4] * x * (4.0 * zz - xx - yy)
    basis[:, 14] = c3[5] * z * (xx - yy)
    basis[:, 15] = c3[6] * x * (xx - 3.0 * yy)
    zero = 0.0 * x
    grad[:, 9] = np.stack([6.0 * c3[0] * x * y, c3[0] * (3.0 * xx - 3.0 * yy), zero], axis=1)
    grad[:, 10] = np.stack([c3[1] * y * z, c3[1] * x * z, c3[1] * x * y], axis=1)
    grad[:, 11] = np.stack([-2.0 * c3[2] * x * y, c3[2] * (4.0 * zz - xx - 3.0 * yy),
                            8.0 * c3[2] * y * z], axis=1)
    grad[:, 12] = np.stack([-6.0 * c3[3] * x * z, -6.0 * c3[3] * y * z,
                            c3[3] * (6.0 * zz - 3.0 * xx - 3.0 * yy)], axis=1)
    grad[:, 13] = np.stack([c3[4] * (4.0 * zz - 3.0 * xx - yy), -2.0 * c3[4] * x * y,
                            8.0 * c3[4] * x * z], axis=1)
    grad[:, 14] = np.stack([2.0 * c3[5] * x * z, -2.0 * c3[5] * y * z, c3[5] * (xx - yy)], axis=1)
    grad[:, 15] = np.stack([c3[6] * (3.0 * xx - 3.0 * yy), -6.0 * c3[6] * x * y, zero], axis=1)
    return basis, grad


def _unit(dirs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(dirs, axis=1, keepdims=True)
    norms = np.where(norms > 0.0, norms, 1.0)
    return dirs / norms, norms


def sh_colors(sh_coeffs: np.ndarray, dirs: np.ndarray, degree: int) -> Tuple[np.ndarray, np.ndarray]:
    """Clamped and raw RGB for (N, K, 3) coefficients seen along (N, 3) directions."""
    unit, _ = _unit(dirs)
    k = (degree + 1) ** 2
    basis, _ = sh_basis(unit, degree)
    raw = np.einsum("nk,nkc->nc", basis, sh_coeffs[:, :k, :]) + AppConstants.SH_OFFSET
    return np.maximum(raw, 0.0), raw


def eval_sh(sh_coeffs, view_dir, degree: int) -> np.ndarray:
    """RGB of one Gaussian; degenerate directions are renormalized."""
    coeffs = np.asarray(sh_coeffs, dtype=np.float64)
    coeffs = coeffs.reshape(1, -1, 3)
    colors, _ = sh_colors(coeffs, np.asarray(view_dir, dtype=np.float64).reshape(1, 3), degree)
    return colors[0]


def sh_vjp(sh_coeffs: np.ndarray, dirs: np.ndarray, degree: int,
           raw: np.ndarray, d_colors: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """dL/dsh (N, K, 3) and dL/d(unnormalized direction) (N, 3); clamped channels pass nothing."""
    unit, norms = _unit(dirs)
    k = (degree + 1) ** 2
    basis, basis_grad = sh_basis(unit, degree)
    d_raw = np.where(raw >= 0.0, d_colors, 0.0)
    d_sh = np.zeros_like(sh_coeffs)
    d_sh[:, :k, :] = basis[:, :, None] * d_raw[:, None, :]
    d_basis = np.einsum("nkc,nc->nk", sh_coeffs[:, :k, :], d_raw)
    d_unit = np.einsum("nk,nkj->nj", d_basis, basis_grad)
    radial = np.sum(d_unit * unit, axis=1, keepdims=True)
    d_dirs = (d_unit - radial * unit) / norms
    return d_sh, d_dirs
