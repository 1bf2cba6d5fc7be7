from enum import Enum

class GradientClass(Enum):
    CENTERS = 'centers'
    OPACITY_LOGITS = 'opacity_logits'
    LOG_SCALES = 'log_scales'
    ROTATIONS = 'rotations'
    SH = 'sh'
    MASK_SOFT = 'mask_soft'
