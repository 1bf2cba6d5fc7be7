import hashlib
from typing import Iterable
import numpy as np


def array_checksum(arrays: Iterable[np.ndarray]) -> str:
    """SHA-256 over the raw float64 bytes of the given arrays, in order."""
    sha256_hash = hashlib.sha256()
    for array in arrays:
        block = np.ascontiguousarray(np.asarray(array, dtype=np.float64))
        sha256_hash.update(str(block.shape).encode("utf-8"))
        sha256_hash.update(block.tobytes())
    return sha256_hash.hexdigest()
