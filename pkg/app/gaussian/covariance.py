"""
3D covariance construction Sigma = R S S^T R^T from a quaternion and log-scales,
plus its vector-Jacobian product back to the raw parameters.
"""
from typing import Tuple
import numpy as np
from app.base.exceptions import InvalidParameterError
from app.constants.app_constants import AppConstants


def normalize_quaternions(rotations: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    rotations = np.atleast_2d(np.asarray(rotations, dtype=np.float64))
    norms = np.linalg.norm(rotations, axis=1)
    if np.any(norms <= AppConstants.QUATERNION_EPS):
        bad = np.flatnonzero(norms <= AppConstants.QUATERNION_EPS)
        raise InvalidParameterError(f"zero quaternion at index {bad[:8].tolist()}")
    return rotations / norms[:, None], norms


def quaternion_to_rotation(q: np.ndarray) -> np.ndarray:
    """Rotation matrices for unit quaternions (w, x, y, z); shape (N, 3, 3)."""
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    rot = np.empty((q.shape[0], 3, 3))
    rot[:, 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    rot[:, 0, 1] = 2.0 * (x * y - w * z)
    rot[:, 0, 2] = 2.0 * (x * z + w * y)
    rot[:, 1, 0] = 2.0 * (x * y + w * z)
    rot[:, 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    rot[:, 1, 2] = 2.0 * (y * z - w * x)
    rot[:, 2, 0] = 2.0 * (x * z - w * y)
    rot[:, 2, 1] = 2.0 * (y * z + w * x)
    rot[:, 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return rot


def rotation_vjp(q: np.ndarray, d_rot: np.ndarray) -> np.ndarray:
    """dL/dq for unit quaternions given dL/dR; shape (N, 4)."""
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    g = d_rot
    d_w = 2.0 * (-z * g[:, 0, 1] + y * g[:, 0, 2] + z * g[:, 1, 0]
                 - x * g[:, 1, 2] - y * g[:, 2, 0] + x * g[:, 2, 1])
    d_x = 2.0 * (y * g[:, 0, 1] + z * g[:, 0, 2] + y * g[:, 1, 0] - 2.0 * x * g[:, 1, 1]
                 - w * g[:, 1, 2] + z * g[:, 2, 0] + w * g[:, 2, 1] - 2.0 * x * g[:, 2, 2])
    d_y = 2.0 * (-2.0 * y * g[:, 0, 0] + x * g[:, 0, 1] + w * g[:, 0, 2] + x * g[:, 1, 0]
                 + z * g[:, 1, 2] - w * g[:, 2, 0] + z * g[:, 2, 1] - 2.0 * y * g[:, 2, 2])
    d_z = 2.0 * (-2.0 * z * g[:, 0, 0] - w * g[:, 0, 1] + x * g[:, 0, 2] + w * g[:, 1, 0]
                 - 2.0 * z * g[:, 1, 1] + y * g[:, 1, 2] + x * g[:, 2, 0] + y * g[:, 2, 1])
    return np.stack([d_w, d_x, d_y, d_z], axis=1)


def build_covariances(rotations: np.ndarray, log_scales: np.ndarray) -> np.ndarray:
    q, _ = normalize_quaternions(rotations)
    rot = quaternion_to_rotation(q)
    m = rot * np.exp(np.atleast_2d(log_scales))[:, None, :]
    return m @ np.transpose(m, (0, 2, 1))


def build_covariance(rotation, log_scales) -> np.ndarray:
    """Sigma for a single Gaussian; raises InvalidParameterError on a zero quaternion."""
    return build_covariances(np.asarray(rotation, dtype=np.float64)[None],
                             np.asarray(log_scales, dtype=np.float64)[None])[0]


def covariance_vjp(rotations: np.ndarray, log_scales: np.ndarray,
                   d_sigma: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Chain dL/dSigma (N, 3, 3) into raw quaternions and log-scales.
    Sigma = M M^T with M = R diag(s); the quaternion gradient includes the
    normalization Jacobian so it is orthogonal to q.
    """
    q, norms = normalize_quaternions(rotations)
    rot = quaternion_to_rotation(q)
    scales = np.exp(log_scales)
    m = rot * scales[:, None, :]
    d_sigma_sym = d_sigma + np.transpose(d_sigma, (0, 2, 1))
    d_m = d_sigma_sym @ m
    d_scales = np.einsum("nij,nij->nj", d_m, rot)
    d_rot = d_m * scales[:, None, :]
    d_q_unit = rotation_vjp(q, d_rot)
    radial = np.sum(d_q_unit * q, axis=1, keepdims=True)
    d_rotations = (d_q_unit - radial * q) / norms[:, None]
    return d_rotations, d_scales * scales
