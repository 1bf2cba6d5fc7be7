"""
Training loop: sample masks, render, render + mask loss, backward, Adam,
with 3DGS densification and mask-based pruning on a fixed schedule.
"""
import logging
import time
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
import numpy as np
import pandas as pd
from tqdm import tqdm
from app.base.exceptions import NonFiniteError
from app.constants.log_messages import LogMessages
from app.enums.mask_mode import MaskMode
from app.enums.parameter_group import ParameterGroup
from app.mask.loss import mask_loss
from app.mask.pruning import prune_below_threshold, prune_never_sampled
from app.mask.sampling import draw_masks, mask_logit_grads
from app.models.camera_model import Camera
from app.models.config_model import AppConfig
from app.models.gaussian_cloud_model import GaussianCloud
from app.models.mask_model import MaskSample
from app.models.scene_model import SyntheticScene
from app.models.train_model import EvalPoint, PruneEvent, TrainReport
from app.raster.rasterizer import Rasterizer
from app.trainer.checkpoint import save_checkpoint
from app.trainer.densify import DensifyStats, densify, prune_mask, reset_opacity
from app.trainer.losses import render_loss_with_grad, total_loss
from app.trainer.metrics import psnr, ssim
from app.trainer.optimizer import Adam
from app.trainer.schedules import LambdaSchedule, learning_rates
from app.utils.file_system import FileSystem

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ["iteration", "loss", "render_loss", "mask_loss", "lambda_m", "gaussian_count", "psnr", "ssim"]


class Trainer:
    """
    Owns the mutable training state (cloud, Adam moments, densify stats and
    random streams). `masked=False` runs the plain 3DGS loop: standard
    blending, no mask loss and no mask pruning.
    """

    def __init__(self, cloud: GaussianCloud, cameras: Sequence[Camera], targets: Sequence[np.ndarray],
                 config: AppConfig, train_index: Optional[List[int]] = None,
                 eval_index: Optional[List[int]] = None, background=(0.0, 0.0, 0.0), extent: float = 1.0,
                 output_dir: Optional[Union[str, Path]] = None, masked: bool = True) -> None:
        self.cloud = cloud.copy()
        self.cameras = list(cameras)
        self.targets = [np.asarray(target, dtype=np.float64) for target in targets]
        self.config = config
        self.train_index = list(range(len(self.cameras))) if train_index is None else list(train_index)
        if not self.train_index:
            raise ValueError("training needs at least one training view")
        self.eval_index = list(eval_index or [])
        self.background = np.asarray(background, dtype=np.float64)
        self.extent = float(extent)
        self.output_dir = Path(output_dir) if output_dir is not None else None
        self.masked = masked
        self.masks_frozen = False

        self.rasterizer = Rasterizer(config.raster.model_copy(update={"gradient_mode": True}))
        self.eval_rasterizer = Rasterizer(config.raster.model_copy(update={"gradient_mode": False}))
        self.optimizer = Adam()
        self.schedule = LambdaSchedule(config.train, config.mask)
        if self.samples_masks and not self.schedule.active_at_all:
            logger.info(LogMessages.MASK_LOSS_OFF)
        self.stats = DensifyStats(self.cloud.n)
        self.view_rng = np.random.default_rng(config.train.seed)
        self.mask_rng = np.random.default_rng(config.mask.seed)
        self.densify_rng = np.random.default_rng(config.train.seed + 1)
        self.report = TrainReport(initial_gaussian_count=self.cloud.n)
        self.rows: List[dict] = []
        self.started = time.perf_counter()

    @property
    def samples_masks(self) -> bool:
        return self.masked and self.config.mask.mode is not MaskMode.ALL_ON

    @property
    def masks_active(self) -> bool:
        return self.masked and not self.masks_frozen

    def active_sh_degree(self, iteration: int) -> int:
        train = self.config.train
        if train.sh_increase_interval <= 0:
            return train.sh_degree
        return min(train.sh_degree, iteration // train.sh_increase_interval)

    # -- compaction ---------------------------------------------------------

    def _keep(self, keep: np.ndarray, iteration: int, reason: str) -> None:
        before = self.cloud.n
        keep = np.asarray(keep, dtype=np.int64)
        if keep.size == before:
            return
        self.cloud = self.cloud.subset(keep)
        self.optimizer.select(keep)
        self.stats.select(keep)
        self.report.prune_events.append(PruneEvent(iteration=iteration, before=before, after=self.cloud.n,
                                                   reason=reason))
        logger.info(LogMessages.PRUNED.format(before, self.cloud.n, reason))

    def mask_prune(self, iteration: int, reason: str) -> None:
        if not self.samples_masks or self.masks_frozen or self.cloud.n == 0:
            return
        if self.config.mask.mode is MaskMode.STE:
            keep = prune_below_threshold(self.cloud.mask_logits, self.config.mask.ste_threshold)
        else:
            keep = prune_never_sampled(self.cloud.mask_logits, self.config.mask.prune_repeats, self.mask_rng)
        self._keep(keep, iteration, reason)

    def freeze_masks(self, iteration: int) -> None:
        """Last mask prune; the survivors train on without sampling or mask loss."""
        if not self.masks_active:
            return
        self.mask_prune(iteration, "freeze")
        self.masks_frozen = True
        logger.info(LogMessages.MASKS_FROZEN.format(iteration, self.cloud.n))

    def densify_and_prune(self, iteration: int) -> None:
        config = self.config.train.densify
        grads = self.stats.mean_grads()
        max_radii = self.stats.max_radii
        self.cloud, survivors, n_clone, n_split = densify(self.cloud, grads, config, self.extent,
                                                          self.densify_rng)
        added = n_clone + 2 * n_split
        if added:
            self.optimizer.select(survivors)
            self.optimizer.extend(added)
            max_radii = np.concatenate([max_radii[survivors], np.zeros(added)])
        self.report.densify_iterations.append(iteration)

        check_size = config.opacity_reset_interval > 0 and iteration > config.opacity_reset_interval
        remove = prune_mask(self.cloud, max_radii, config, self.extent, check_size)
        self.stats.reset(self.cloud.n)
        if np.any(remove):
            self._keep(np.flatnonzero(~remove), iteration, "opacity/size")
        self.mask_prune(iteration, "mask")

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, iteration: int) -> EvalPoint:
        views = self.eval_index or self.train_index
        degree = self.active_sh_degree(iteration)
        if self.eval_rasterizer.settings.sh_degree != degree:
            self.eval_rasterizer.settings = self.eval_rasterizer.settings.model_copy(update={"sh_degree": degree})
        psnrs, ssims = [], []
        for view in views:
            frame = self.eval_rasterizer.render(self.cloud, self.cameras[view], self.background,
                                                MaskSample.ones(self.cloud.n))
            image = np.clip(frame.color.astype(np.float64), 0.0, 1.0)
            psnrs.append(psnr(image, self.targets[view]))
            ssims.append(ssim(image, self.targets[view]))
        point = EvalPoint(iteration=iteration, psnr=float(np.mean(psnrs)), ssim=float(np.mean(ssims)),
                          gaussian_count=self.cloud.n, wall_time=time.perf_counter() - self.started)
        self.report.eval_points.append(point)
        logger.info(LogMessages.EVAL_POINT.format(iteration, point.psnr, point.ssim, point.gaussian_count))
        return point

    def checkpoint(self, tag: str, iteration: int) -> None:
        if self.output_dir is None:
            return
        save_checkpoint(self.output_dir, tag, self.cloud, self.optimizer, {
            "iteration": iteration,
            "lambda_m": self.schedule(iteration),
            "sh_degree": self.active_sh_degree(iteration),
        })

    def _abort(self, iteration: int, what: str, diagnostics: dict) -> None:
        message = LogMessages.NON_FINITE.format(what, iteration, diagnostics)
        logger.error(message)
        self.checkpoint("last_good", iteration)
        raise NonFiniteError(message, diagnostics)

    # -- one step -----------------------------------------------------------

    def step(self, iteration: int) -> dict:
        config = self.config
        view = self.train_index[int(self.view_rng.integers(len(self.train_index)))]
        camera, target = self.cameras[view], self.targets[view]
        degree = self.active_sh_degree(iteration)
        if self.rasterizer.settings.sh_degree != degree:
            self.rasterizer.settings = self.rasterizer.settings.model_copy(update={"sh_degree": degree})
        lambda_m = self.schedule(iteration) if self.masks_active else 0.0

        splats = self.rasterizer.project(self.cloud, camera)
        if self.masks_active:
            masks = draw_masks(self.cloud.mask_logits, config.mask, self.mask_rng)
            frame = self.rasterizer.render_masked(splats, masks, camera, self.background)
        else:
            masks = None
            frame = self.rasterizer.render_standard(splats, camera, self.background)

        render_value, d_image = render_loss_with_grad(frame.color, target, config.train.ssim_weight)
        mask_value, d_soft_loss = mask_loss(masks, config.mask.loss_kind) if masks is not None and masks.n \
            else (0.0, np.zeros(self.cloud.n))
        loss = total_loss(render_value, mask_value, lambda_m)
        if not np.isfinite(loss):
            self._abort(iteration, "loss", {"render_loss": render_value, "mask_loss": mask_value})

        grads = self.rasterizer.backward(frame, d_image, self.cloud, camera)
        self.report.overflow_total += grads.overflow_count
        self.report.guarded_total += grads.guarded_count
        if masks is not None:
            d_mask_logits = mask_logit_grads(masks, grads.d_mask_soft + lambda_m * d_soft_loss)
        else:
            d_mask_logits = np.zeros_like(self.cloud.mask_logits)

        densify_config = config.train.densify
        if densify_config.enabled and iteration < densify_config.stop:
            self.stats.accumulate(grads, splats)

        lrs = learning_rates(config.train.learning_rates, config.mask.learning_rate if self.masks_active else 0.0,
                             iteration, config.train.iterations, self.extent)
        try:
            self.optimizer.step(self.cloud.parameters(), grads.by_group(d_mask_logits), lrs, iteration)
        except NonFiniteError as err:
            self._abort(iteration, "gradient", err.diagnostics)

        return {"iteration": iteration, "loss": loss, "render_loss": render_value, "mask_loss": mask_value,
                "lambda_m": lambda_m, "gaussian_count": self.cloud.n}

    def after_step(self, iteration: int) -> None:
        """Schedule events keyed on the 1-based iteration just completed."""
        train = self.config.train
        densify_config = train.densify
        if densify_config.enabled and iteration < densify_config.stop:
            if iteration > densify_config.start and iteration % densify_config.interval == 0:
                self.densify_and_prune(iteration)
            reset = densify_config.opacity_reset_interval
            if reset > 0 and iteration % reset == 0:
                reset_opacity(self.cloud, densify_config.opacity_reset_value)
                self.optimizer.reset_rows(ParameterGroup.OPACITY_LOGITS)
                logger.info(LogMessages.OPACITY_RESET.format(iteration))
        else:
            since = iteration - (densify_config.stop if densify_config.enabled else 0)
            if since > 0 and since % train.prune_interval_after_densify == 0:
                self.mask_prune(iteration, "mask")

        if train.mask_until and iteration == train.mask_until:
            self.freeze_masks(iteration)
        if iteration % train.eval_interval == 0:
            self.evaluate(iteration)
            self.rows[-1].update(psnr=self.report.eval_points[-1].psnr, ssim=self.report.eval_points[-1].ssim)
        if train.checkpoint_interval and iteration % train.checkpoint_interval == 0:
            self.checkpoint(str(iteration), iteration)

    def run(self) -> Tuple[TrainReport, GaussianCloud]:
        train = self.config.train
        progress = tqdm(range(1, train.iterations + 1), desc="Training", disable=not train.progress)
        for iteration in progress:
            row = self.step(iteration - 1)
            row["iteration"] = iteration
            self.rows.append(row)
            self.report.losses.append(row["loss"])
            self.after_step(iteration)
            if iteration % 10 == 0:
                progress.set_postfix({"loss": f"{row['loss']:.5f}", "n": self.cloud.n})
        progress.close()

        if train.final_prune:
            self.mask_prune(train.iterations, "final")
        final = self.evaluate(train.iterations)
        self.report.iterations = train.iterations
        self.report.final_gaussian_count = self.cloud.n
        self.report.final_psnr = final.psnr
        self.report.final_ssim = final.ssim
        self.report.wall_time = time.perf_counter() - self.started
        if self.output_dir is not None:
            self.checkpoint("final", train.iterations)
            write_metrics(self.rows, self.output_dir / "metrics.csv")
        return self.report, self.cloud


def metrics_frame(rows: List[dict]) -> pd.DataFrame:
    return pd.DataFrame(rows).reindex(columns=METRIC_COLUMNS)


def write_metrics(rows: List[dict], path: Union[str, Path]) -> Path:
    frame = metrics_frame(rows)
    return FileSystem().atomic_write(path, lambda tmp: frame.to_csv(tmp, index=False))


def run_training(cloud: GaussianCloud, cameras: Sequence[Camera], targets: Sequence[np.ndarray],
                 config: AppConfig, **kwargs) -> Tuple[TrainReport, GaussianCloud]:
    """Train `cloud` against `targets`; see Trainer for the keyword options."""
    return Trainer(cloud, cameras, targets, config, **kwargs).run()


def train_on_scene(scene: SyntheticScene, config: AppConfig,
                   output_dir: Optional[Union[str, Path]] = None,
                   masked: bool = True) -> Tuple[TrainReport, GaussianCloud]:
    return run_training(scene.initial_cloud, scene.cameras, scene.targets, config,
                        train_index=scene.train_index, eval_index=scene.eval_index,
                        background=scene.background, extent=scene.extent,
                        output_dir=output_dir, masked=masked)
