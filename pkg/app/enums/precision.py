from enum import Enum
import numpy as np

class Precision(Enum):
    FLOAT32 = 'float32'
    FLOAT64 = 'float64'

    @property
    def dtype(self):
        return np.float32 if self is Precision.FLOAT32 else np.float64
