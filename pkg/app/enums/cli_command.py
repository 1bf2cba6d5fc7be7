from enum import Enum

class CliCommand(Enum):
    TRAIN = 'train'
    RENDER = 'render'
    PRUNE = 'prune'
    GRADCHECK = 'gradcheck'
    BENCH = 'bench'
    STATS = 'stats'
