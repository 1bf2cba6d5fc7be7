from pathlib import Path
from typing import List, Optional, Union
import numpy as np
from pydantic import ValidationError
from app.base.exceptions import SceneManifestError
from app.models.camera_model import Camera
from app.models.scene_model import CameraRecord, SceneManifest
from app.scene_io.image_io import image_size, load_png
from app.utils.file_system import FileSystem


def _resolve(manifest_path: Path, image: str) -> Path:
    path = Path(image)
    return path if path.is_absolute() else manifest_path.parent / path


def load_manifest(path: Union[str, Path], require_images: bool = False) -> SceneManifest:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"manifest not found: {path}")
    try:
        manifest = SceneManifest.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as err:
        raise SceneManifestError(f"invalid manifest {path}: {err}") from err
    for index, record in enumerate(manifest.cameras):
        if record.image is None:
            if require_images:
                raise SceneManifestError(f"camera {index} has no image")
            continue
        image_path = _resolve(path, record.image)
        if not image_path.exists():
            raise SceneManifestError(f"camera {index} references missing image {image_path}")
        width, height = image_size(image_path)
        if (width, height) != (record.width, record.height):
            raise SceneManifestError(f"camera {index} image is {width}x{height}, "
                                     f"declared {record.width}x{record.height}")
    return manifest


def manifest_cameras(manifest: SceneManifest) -> List[Camera]:
    return [record.to_camera() for record in manifest.cameras]


def manifest_images(manifest: SceneManifest, manifest_path: Union[str, Path]) -> List[Optional[np.ndarray]]:
    manifest_path = Path(manifest_path)
    return [load_png(_resolve(manifest_path, record.image)) if record.image else None
            for record in manifest.cameras]


def save_manifest(cameras: List[Camera], path: Union[str, Path], train: List[int], eval_index: List[int],
                  background, images: Optional[List[str]] = None) -> Path:
    images = images or [None] * len(cameras)
    manifest = SceneManifest(
        cameras=[CameraRecord.from_camera(camera, image) for camera, image in zip(cameras, images)],
        train=list(train),
        eval=list(eval_index),
        background=tuple(float(value) for value in background),
    )
    return FileSystem().atomic_write_text(path, manifest.model_dump_json(indent=2))


def camera_extent(cameras: List[Camera]) -> float:
    """1.1 x the largest camera distance from the mean camera centre."""
    centers = np.stack([camera.center for camera in cameras])
    radius = float(np.max(np.linalg.norm(centers - centers.mean(axis=0), axis=1)))
    return 1.1 * radius if radius > 0.0 else 1.0
