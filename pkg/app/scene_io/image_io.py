from pathlib import Path
from typing import Union
import numpy as np
from PIL import Image
from app.utils.file_system import FileSystem


def quantize(image: np.ndarray) -> np.ndarray:
    """Linear [0, 1] float to 8-bit, round to nearest."""
    return np.round(np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0) * 255.0).astype(np.uint8)


def save_png(image: np.ndarray, path: Union[str, Path]) -> Path:
    pixels = Image.fromarray(quantize(image), mode="RGB")
    return FileSystem().atomic_write(path, lambda tmp: pixels.save(tmp, format="PNG"))


def load_png(path: Union[str, Path]) -> np.ndarray:
    with Image.open(path) as image:
        return np.asarray(image.convert("RGB"), dtype=np.float64) / 255.0


def image_size(path: Union[str, Path]):
    with Image.open(path) as image:
        return image.size
