from typing import Optional
import numpy as np
from app.constants.app_constants import AppConstants
from app.models.camera_model import Camera
from app.models.raster_model import TileBinning
from app.models.splat_model import SplatBatch


def tile_grid(width: int, height: int, tile_size: int):
    return (width + tile_size - 1) // tile_size, (height + tile_size - 1) // tile_size


def bin_and_sort(splats: SplatBatch, camera: Optional[Camera] = None,
                 tile_size: int = AppConstants.TILE_SIZE) -> TileBinning:
    """
    Duplicate each splat into every tile its footprint square touches, then
    order all (tile, splat) pairs by tile, depth and source index.
    """
    width = camera.width if camera is not None else splats.width
    height = camera.height if camera is not None else splats.height
    tiles_x, tiles_y = tile_grid(width, height, tile_size)
    n_tiles = tiles_x * tiles_y
    means, radii = splats.means2d, splats.radii

    raw_x = np.ceil(means[:, 0] - radii), np.floor(means[:, 0] + radii)
    raw_y = np.ceil(means[:, 1] - radii), np.floor(means[:, 1] + radii)
    touches = ((raw_x[0] <= raw_x[1]) & (raw_y[0] <= raw_y[1]) & (raw_x[1] >= 0) & (raw_y[1] >= 0)
               & (raw_x[0] <= width - 1) & (raw_y[0] <= height - 1))
    x_lo = np.clip(raw_x[0], 0, width - 1).astype(np.int64)
    x_hi = np.clip(raw_x[1], 0, width - 1).astype(np.int64)
    y_lo = np.clip(raw_y[0], 0, height - 1).astype(np.int64)
    y_hi = np.clip(raw_y[1], 0, height - 1).astype(np.int64)
    tx0, tx1 = x_lo // tile_size, x_hi // tile_size
    ty0, ty1 = y_lo // tile_size, y_hi // tile_size
    span_x = tx1 - tx0 + 1
    counts = np.where(touches, span_x * (ty1 - ty0 + 1), 0)

    slots = np.repeat(np.arange(splats.n, dtype=np.int64), counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    local = np.arange(slots.shape[0], dtype=np.int64) - starts
    tile_ids = ((ty0[slots] + local // span_x[slots]) * tiles_x
                + tx0[slots] + local % span_x[slots])

    order = np.lexsort((splats.source_index[slots], splats.depths[slots], tile_ids))
    entries = slots[order]
    entry_tiles = tile_ids[order]
    tile_index = np.arange(n_tiles)
    ranges = np.stack([np.searchsorted(entry_tiles, tile_index, side="left"),
                       np.searchsorted(entry_tiles, tile_index, side="right")], axis=1)
    return TileBinning(
        tile_size=tile_size,
        tiles_x=tiles_x,
        tiles_y=tiles_y,
        entries=entries.astype(np.int64),
        entry_tiles=entry_tiles.astype(np.int64),
        ranges=ranges.astype(np.int64),
        radii=radii,
    )
