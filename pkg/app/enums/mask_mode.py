from enum import Enum

class MaskMode(Enum):
    GUMBEL = 'gumbel'
    STE = 'ste'
    ALL_ON = 'all_on'
