"""
3DGS-compatible binary PLY for Gaussian clouds, with optional
mask_logit_0/1 extension properties.
"""
import io
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union
import numpy as np
from plyfile import PlyData, PlyElement, PlyElementParseError, PlyHeaderParseError, PlyListProperty
from app.base.exceptions import PlyParseError
from app.constants.app_constants import AppConstants
from app.constants.log_messages import LogMessages
from app.constants.ply_constants import PlyConstants
from app.models.gaussian_cloud_model import GaussianCloud
from app.utils.file_system import FileSystem

END_HEADER = b"end_header"
FLOAT_KINDS = ("f",)


def attribute_names(sh_count: int, with_masks: bool = True) -> List[str]:
    names = list(PlyConstants.POSITION) + list(PlyConstants.NORMAL)
    names += [f"{PlyConstants.DC_PREFIX}{i}" for i in range(3)]
    names += [f"{PlyConstants.REST_PREFIX}{i}" for i in range(3 * (sh_count - 1))]
    names.append(PlyConstants.OPACITY)
    names += [f"{PlyConstants.SCALE_PREFIX}{i}" for i in range(3)]
    names += [f"{PlyConstants.ROTATION_PREFIX}{i}" for i in range(4)]
    if with_masks:
        names += [f"{PlyConstants.MASK_PREFIX}{i}" for i in range(2)]
    return names


def _header_offsets(raw: bytes) -> Tuple[int, Dict[bytes, int]]:
    """Length of the header and the byte offset of each header line."""
    end = raw.find(END_HEADER)
    if end < 0:
        raise PlyParseError("malformed header: no end_header line", offset=len(raw))
    newline = raw.find(b"\n", end)
    header_len = len(raw) if newline < 0 else newline + 1
    offsets, position = {}, 0
    for line in raw[:header_len].split(b"\n"):
        offsets.setdefault(line.strip(), position)
        position += len(line) + 1
    return header_len, offsets


def _property_offset(offsets: Dict[bytes, int], name: str) -> Optional[int]:
    for line, position in offsets.items():
        parts = line.split()
        if len(parts) >= 3 and parts[0] == b"property" and parts[-1].decode(errors="replace") == name:
            return position
    return None


def read_ply_with_extras(path: Union[str, Path],
                         init_logits=AppConstants.MASK_INIT_LOGITS) -> Tuple[GaussianCloud, Dict[str, np.ndarray]]:
    raw = Path(path).read_bytes()
    header_len, offsets = _header_offsets(raw)
    try:
        ply = PlyData.read(io.BytesIO(raw))
    except PlyHeaderParseError as err:
        line_offset = None
        if getattr(err, "line", None):
            line_offset = sum(len(line) + 1 for line in raw[:header_len].split(b"\n")[:err.line - 1])
        raise PlyParseError(f"malformed header: {err}", offset=line_offset) from err
    except PlyElementParseError as err:
        row = getattr(err, "row", None) or 0
        row_size = getattr(getattr(err, "element", None), "dtype", lambda: None)()
        stride = np.dtype(row_size).itemsize if row_size is not None else 0
        raise PlyParseError(f"truncated or corrupt payload: {err}", offset=header_len + row * stride) from err

    if PlyConstants.VERTEX not in ply:
        raise PlyParseError("no vertex element", offset=0)
    vertex = ply[PlyConstants.VERTEX]
    declared = {prop.name: prop for prop in vertex.properties}

    rest = sorted((name for name in declared if name.startswith(PlyConstants.REST_PREFIX)),
                  key=lambda name: int(name.split("_")[-1]))
    sh_count = len(rest) // 3 + 1
    if len(rest) % 3 or sh_count not in (1, 4, 9, 16):
        raise PlyParseError(f"{len(rest)} f_rest properties do not form an SH basis of degree 0..3",
                            offset=_property_offset(offsets, rest[0]) if rest else None)
    required = attribute_names(sh_count, with_masks=False)
    for name in required:
        if name not in declared:
            raise PlyParseError(f"missing vertex property '{name}'", offset=offsets.get(END_HEADER))
        prop = declared[name]
        if isinstance(prop, PlyListProperty) or np.dtype(prop.val_dtype).kind not in FLOAT_KINDS:
            raise PlyParseError(f"property '{name}' must be a float scalar", offset=_property_offset(offsets, name))

    def column(name: str) -> np.ndarray:
        return np.asarray(vertex[name], dtype=np.float64)

    def stack(names) -> np.ndarray:
        return np.stack([column(name) for name in names], axis=1) if names else np.zeros((vertex.count, 0))

    n = vertex.count
    sh = np.zeros((n, sh_count, 3))
    sh[:, 0, :] = stack([f"{PlyConstants.DC_PREFIX}{i}" for i in range(3)])
    if sh_count > 1:
        sh[:, 1:, :] = stack(rest).reshape(n, 3, sh_count - 1).transpose(0, 2, 1)

    mask_names = [f"{PlyConstants.MASK_PREFIX}{i}" for i in range(2)]
    if all(name in declared for name in mask_names):
        mask_logits = stack(mask_names)
    else:
        logging.info(LogMessages.MASK_DEFAULTED.format(tuple(init_logits)))
        mask_logits = np.tile(np.asarray(init_logits, dtype=np.float64), (n, 1))

    known = set(required) | set(mask_names)
    extras = {name: column(name) for name in declared if name not in known}
    cloud = GaussianCloud(
        centers=stack(list(PlyConstants.POSITION)),
        opacity_logits=column(PlyConstants.OPACITY),
        log_scales=stack([f"{PlyConstants.SCALE_PREFIX}{i}" for i in range(3)]),
        rotations=stack([f"{PlyConstants.ROTATION_PREFIX}{i}" for i in range(4)]),
        sh_coeffs=sh,
        mask_logits=mask_logits,
    )
    logging.info(LogMessages.PLY_LOADED.format(cloud.n, path))
    return cloud, extras


def read_ply(path: Union[str, Path], init_logits=AppConstants.MASK_INIT_LOGITS) -> GaussianCloud:
    cloud, _ = read_ply_with_extras(path, init_logits)
    return cloud


def write_ply(cloud: GaussianCloud, path: Union[str, Path],
              extras: Optional[Dict[str, np.ndarray]] = None) -> Path:
    n, sh_count = cloud.n, cloud.sh_coeffs.shape[1]
    f_rest = cloud.sh_coeffs[:, 1:, :].transpose(0, 2, 1).reshape(n, 3 * (sh_count - 1))
    attributes = np.concatenate([
        cloud.centers, np.zeros((n, 3)), cloud.sh_coeffs[:, 0, :], f_rest,
        cloud.opacity_logits[:, None], cloud.log_scales, cloud.rotations, cloud.mask_logits,
    ], axis=1)
    names = attribute_names(sh_count)
    extras = extras or {}
    dtype_full = [(name, PlyConstants.FLOAT) for name in names + list(extras)]
    elements = np.empty(n, dtype=dtype_full)
    for i, name in enumerate(names):
        elements[name] = attributes[:, i]
    for name, values in extras.items():
        elements[name] = values
    data = PlyData([PlyElement.describe(elements, PlyConstants.VERTEX)], byte_order="<")
    written = FileSystem().atomic_write(path, lambda tmp: data.write(str(tmp)))
    logging.info(LogMessages.PLY_WRITTEN.format(n, written))
    return written
