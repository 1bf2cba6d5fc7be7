from typing import Tuple
import numpy as np
from app.base.exceptions import InvalidArgumentError
from app.enums.mask_loss_kind import MaskLossKind
from app.models.mask_model import MaskSample


def mask_loss(sample: MaskSample, kind: MaskLossKind = MaskLossKind.SQUARED) -> Tuple[float, np.ndarray]:
    """
    Returns (loss, dL/dsoft). The loss is taken over the forward mask values;
    its gradient is handed to the soft relaxation unchanged.
    """
    n = sample.n
    if n < 1:
        raise InvalidArgumentError("mask loss needs at least one Gaussian")
    mean = float(np.mean(sample.forward_values))
    if kind is MaskLossKind.SQUARED:
        return mean * mean, np.full(n, 2.0 * mean / n)
    return mean, np.full(n, 1.0 / n)
