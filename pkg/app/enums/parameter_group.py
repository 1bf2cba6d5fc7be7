from enum import Enum

class ParameterGroup(Enum):
    CENTERS = 'centers'
    OPACITY_LOGITS = 'opacity_logits'
    LOG_SCALES = 'log_scales'
    ROTATIONS = 'rotations'
    SH_DC = 'sh_dc'
    SH_REST = 'sh_rest'
    MASK_LOGITS = 'mask_logits'
