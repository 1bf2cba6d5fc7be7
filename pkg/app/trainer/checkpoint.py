"""
Checkpoints: the cloud as PLY (mask logits included), a JSON sidecar with
schedule state, and an NPZ of the Adam moments. Each file is written atomically.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union
import numpy as np
from app.constants.log_messages import LogMessages
from app.enums.parameter_group import ParameterGroup
from app.models.gaussian_cloud_model import GaussianCloud
from app.scene_io.ply_io import read_ply, write_ply
from app.trainer.optimizer import Adam
from app.utils.file_system import FileSystem


def checkpoint_paths(folder: Union[str, Path], tag: str) -> Tuple[Path, Path, Path]:
    folder = Path(folder)
    return (folder / f"point_cloud_{tag}.ply",
            folder / f"state_{tag}.json",
            folder / f"optimizer_{tag}.npz")


def save_checkpoint(folder: Union[str, Path], tag: str, cloud: GaussianCloud, optimizer: Adam,
                    state: Dict[str, Any]) -> Path:
    ply_path, state_path, moments_path = checkpoint_paths(folder, tag)
    file_system = FileSystem()
    write_ply(cloud, ply_path)
    sidecar = dict(state, gaussian_count=cloud.n, ply=ply_path.name, optimizer=moments_path.name)
    file_system.atomic_write_text(state_path, json.dumps(sidecar, indent=2, default=float))
    arrays = optimizer.state_arrays()
    file_system.atomic_write(moments_path, lambda tmp: np.savez(tmp, **arrays))
    logging.info(LogMessages.CHECKPOINT_WRITTEN.format(state_path))
    return state_path


def load_checkpoint(state_path: Union[str, Path],
                    optimizer: Optional[Adam] = None) -> Tuple[GaussianCloud, Dict[str, Any]]:
    """Cloud and sidecar state; moments are restored into `optimizer` when given."""
    state_path = Path(state_path)
    state = json.loads(state_path.read_text(encoding="utf-8"))
    cloud = read_ply(state_path.parent / state["ply"])
    if optimizer is not None:
        with np.load(state_path.parent / state["optimizer"]) as moments:
            for group in ParameterGroup:
                key = f"{group.value}.exp_avg"
                if key not in moments:
                    continue
                optimizer.exp_avg[group] = moments[key].copy()
                optimizer.exp_avg_sq[group] = moments[f"{group.value}.exp_avg_sq"].copy()
                optimizer.steps[group] = int(moments[f"{group.value}.step"])
    return cloud, state
