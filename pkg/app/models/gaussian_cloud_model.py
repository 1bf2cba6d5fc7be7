from typing import Any, Dict, Sequence
import numpy as np
from scipy.special import expit, logit
from pydantic import BaseModel, ConfigDict, model_validator
from app.enums.parameter_group import ParameterGroup


def sigmoid(x: np.ndarray) -> np.ndarray:
    return expit(x)


def inverse_sigmoid(p: np.ndarray) -> np.ndarray:
    return logit(np.asarray(p, dtype=np.float64))


def sh_coefficient_count(degree: int) -> int:
    return (degree + 1) ** 2


class GaussianCloud(BaseModel):
    """
    Array-of-records storage for N 3D Gaussians.

    Opacity and scales are stored unconstrained (logit / log); activations
    are applied at read time. `sh_coeffs` is N x (D+1)^2 x 3, coefficient-major.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    centers: Any
    opacity_logits: Any
    log_scales: Any
    rotations: Any
    sh_coeffs: Any
    mask_logits: Any

    @model_validator(mode="before")
    @classmethod
    def _as_arrays(cls, data):
        if isinstance(data, dict):
            data = {key: np.asarray(value, dtype=np.float64) if key in cls.model_fields else value
                    for key, value in data.items()}
        return data

    @model_validator(mode="after")
    def _check_shapes(self):
        n = self.centers.shape[0]
        expected = {
            "centers": (n, 3),
            "opacity_logits": (n,),
            "log_scales": (n, 3),
            "rotations": (n, 4),
            "mask_logits": (n, 2),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        sh = self.sh_coeffs
        if sh.ndim != 3 or sh.shape[0] != n or sh.shape[2] != 3:
            raise ValueError(f"sh_coeffs has shape {sh.shape}, expected ({n}, (D+1)^2, 3)")
        if sh.shape[1] not in (1, 4, 9, 16):
            raise ValueError(f"sh_coeffs holds {sh.shape[1]} coefficients; not a degree 0..3 basis")
        return self

    @property
    def n(self) -> int:
        return int(self.centers.shape[0])

    @property
    def sh_degree(self) -> int:
        return int(round(np.sqrt(self.sh_coeffs.shape[1]))) - 1

    def opacity(self) -> np.ndarray:
        return sigmoid(self.opacity_logits)

    def scales(self) -> np.ndarray:
        return np.exp(self.log_scales)

    def normalized_rotations(self) -> np.ndarray:
        return self.rotations / np.linalg.norm(self.rotations, axis=1, keepdims=True)

    def parameters(self) -> Dict[ParameterGroup, np.ndarray]:
        """Views into the parameter arrays, keyed by optimizer group."""
        return {
            ParameterGroup.CENTERS: self.centers,
            ParameterGroup.OPACITY_LOGITS: self.opacity_logits,
            ParameterGroup.LOG_SCALES: self.log_scales,
            ParameterGroup.ROTATIONS: self.rotations,
            ParameterGroup.SH_DC: self.sh_coeffs[:, :1, :],
            ParameterGroup.SH_REST: self.sh_coeffs[:, 1:, :],
            ParameterGroup.MASK_LOGITS: self.mask_logits,
        }

    def arrays(self) -> Dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in type(self).model_fields}

    def copy(self) -> "GaussianCloud":
        return GaussianCloud(**{name: array.copy() for name, array in self.arrays().items()})

    def subset(self, index: Sequence[int]) -> "GaussianCloud":
        index = np.asarray(index, dtype=np.int64)
        return GaussianCloud(**{name: array[index].copy() for name, array in self.arrays().items()})

    def concat(self, other: "GaussianCloud") -> "GaussianCloud":
        return GaussianCloud(**{name: np.concatenate([array, getattr(other, name)], axis=0)
                                for name, array in self.arrays().items()})

    def astype(self, dtype) -> "GaussianCloud":
        return GaussianCloud(**{name: array.astype(dtype).astype(np.float64)
                                for name, array in self.arrays().items()})

    @classmethod
    def empty(cls, sh_degree: int = 0) -> "GaussianCloud":
        k = sh_coefficient_count(sh_degree)
        return cls(
            centers=np.zeros((0, 3)),
            opacity_logits=np.zeros(0),
            log_scales=np.zeros((0, 3)),
            rotations=np.zeros((0, 4)),
            sh_coeffs=np.zeros((0, k, 3)),
            mask_logits=np.zeros((0, 2)),
        )
