from enum import Enum

class RasterMode(Enum):
    MASKED_BLEND = 'masked_blend'
    MASK_OPACITY = 'mask_opacity'

    @property
    def kernel_code(self) -> int:
        return 0 if self is RasterMode.MASKED_BLEND else 1
