from enum import Enum

class MaskLossKind(Enum):
    SQUARED = 'squared'
    L1 = 'l1'
