from enum import Enum

class SchedulePreset(Enum):
    NONE = 'none'
    OURS_ALPHA = 'ours-alpha'
    OURS_BETA = 'ours-beta'
    OURS_GAMMA = 'ours-gamma'
