"""
Analytic gradients of the tiled renderer against central differences of the
naive renderer on seeded random scenes, per parameter class.
"""
import json
import logging
from typing import Callable, Dict, List, Optional
import numpy as np
from app.constants.app_constants import AppConstants
from app.constants.log_messages import LogMessages
from app.enums.gradient_class import GradientClass
from app.enums.precision import Precision
from app.enums.raster_mode import RasterMode
from app.models.gradient_model import GradientSet
from app.models.mask_model import MaskSample
from app.models.raster_model import RasterSettings
from app.models.verify_model import ClassResult, GradCheckReport, Tolerances, VerifyConfig
from app.raster.rasterizer import Rasterizer
from app.utils.checksum import array_checksum
from app.verify.finite_diff import ParamSelector, finite_diff
from app.verify.naive_renderer import naive_render_with_signature
from app.verify.random_scene import VerificationScene, random_verification_scene, weighted_sum

logger = logging.getLogger(__name__)

GradientTransform = Callable[[GradientSet], GradientSet]
MODES = (RasterMode.MASKED_BLEND, RasterMode.MASK_OPACITY)


def relative_error(analytic: float, numeric: float, floor: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def _parameter_arrays(scene: VerificationScene, masks: np.ndarray) -> Dict[GradientClass, np.ndarray]:
    cloud = scene.cloud
    return {
        GradientClass.CENTERS: cloud.centers,
        GradientClass.OPACITY_LOGITS: cloud.opacity_logits,
        GradientClass.LOG_SCALES: cloud.log_scales,
        GradientClass.ROTATIONS: cloud.rotations,
        GradientClass.SH: cloud.sh_coeffs,
        GradientClass.MASK_SOFT: masks,
    }


def _mask_direction(value: float) -> int:
    """Endpoints are checked one-sided into [0, 1]."""
    if value <= 0.0:
        return 1
    if value >= 1.0:
        return -1
    return 0


class _ClassAccumulator:
    def __init__(self, tolerance: float) -> None:
        self.tolerance = tolerance
        self.errors: List[float] = []
        self.skipped = 0
        self.worst: Optional[dict] = None

    def add(self, error: float, detail: dict) -> None:
        self.errors.append(error)
        if self.worst is None or error > self.worst["rel_error"]:
            self.worst = dict(detail, rel_error=error)

    def result(self) -> ClassResult:
        max_error = max(self.errors, default=0.0)
        return ClassResult(
            max_rel_error=max_error,
            mean_rel_error=float(np.mean(self.errors)) if self.errors else 0.0,
            checked=len(self.errors),
            skipped=self.skipped,
            tolerance=self.tolerance,
            passed=max_error <= self.tolerance,
            worst=self.worst,
        )


def analytic_gradients(scene: VerificationScene, mode: RasterMode, precision: Precision) -> GradientSet:
    settings = RasterSettings.verification(precision=precision, mode=mode,
                                           max_contributors=max(AppConstants.MAX_CONTRIBUTORS, scene.cloud.n))
    rasterizer = Rasterizer(settings)
    masks = MaskSample.relaxed(scene.masks)
    frame = rasterizer.render(scene.cloud, scene.camera, scene.background, masks)
    return rasterizer.backward(frame, scene.weights, scene.cloud, scene.camera)


def check_scene(scene: VerificationScene, scene_id: int, mode: RasterMode, config: VerifyConfig,
                accumulators: Dict[GradientClass, _ClassAccumulator], rng: np.random.Generator,
                analytic_transform: Optional[GradientTransform] = None) -> None:
    grads = analytic_gradients(scene, mode, config.precision)
    if analytic_transform is not None:
        grads = analytic_transform(grads)
    analytic = grads.by_class()
    masks = np.array(scene.masks, dtype=np.float64)
    arrays = _parameter_arrays(scene, masks)
    visible = np.flatnonzero(grads.visible)

    def loss():
        frame, signature = naive_render_with_signature(scene.cloud, masks, scene.camera, scene.background, mode)
        return weighted_sum(frame.color, scene.weights), signature

    for grad_class, array in arrays.items():
        accumulator = accumulators[grad_class]
        class_scale = float(np.max(np.abs(analytic[grad_class]))) if analytic[grad_class].size else 0.0
        floor = max(config.grad_floor, config.relative_floor * class_scale)
        candidates = [(g,) + rest for g in visible for rest in np.ndindex(array.shape[1:])]
        if not candidates:
            continue
        picks = rng.choice(len(candidates), size=min(config.entries_per_class, len(candidates)), replace=False)
        for pick in picks:
            index = candidates[pick]
            direction = _mask_direction(masks[index]) if grad_class is GradientClass.MASK_SOFT else 0
            numeric = finite_diff(ParamSelector(array, index), loss, config.fd_step, direction)
            if numeric.flagged:
                accumulator.skipped += 1
                continue
            value = float(analytic[grad_class][index])
            accumulator.add(relative_error(value, numeric.value, floor), {
                "scene": scene_id, "mode": mode.value, "index": [int(i) for i in index],
                "analytic": value, "numeric": numeric.value,
            })


def gradcheck_suite(seed: int = 0, n_scenes: int = 20, tolerances: Optional[Tolerances] = None,
                    analytic_transform: Optional[GradientTransform] = None,
                    config: Optional[VerifyConfig] = None) -> GradCheckReport:
    """
    Deterministic given (seed, config, tolerances). Entries whose finite
    difference crosses a cutoff or clamp are skipped and counted.
    """
    config = (config or VerifyConfig()).model_copy(update={"seed": seed, "n_scenes": n_scenes})
    tolerances = tolerances or config.tolerances
    report = GradCheckReport(seed=seed, n_scenes=n_scenes, precision=config.precision, tolerances=tolerances)
    if n_scenes == 0:
        logger.warning(LogMessages.EMPTY_GRADCHECK)
        report.warnings.append(LogMessages.EMPTY_GRADCHECK)
        report.descriptor_hash = array_checksum([np.array([seed, 0])])
        return report

    accumulators = {
        grad_class: _ClassAccumulator(tolerances.for_precision(config.precision,
                                                               mask=grad_class is GradientClass.MASK_SOFT))
        for grad_class in GradientClass
    }
    rng = np.random.default_rng(seed)
    for scene_id in range(n_scenes):
        scene = random_verification_scene(rng, config.max_gaussians, config.width, config.height)
        report.scene_hashes.append(scene.descriptor_hash())
        check_scene(scene, scene_id, MODES[scene_id % len(MODES)], config, accumulators, rng, analytic_transform)

    for grad_class, accumulator in accumulators.items():
        result = accumulator.result()
        report.classes[grad_class.value] = result
        logger.info(LogMessages.GRADCHECK_CLASS.format(grad_class.value, result.max_rel_error,
                                                       result.mean_rel_error, result.skipped))
    report.passed = all(result.passed for result in report.classes.values())
    descriptor = json.dumps({"seed": seed, "config": config.model_dump(mode="json"),
                             "tolerances": tolerances.model_dump(mode="json"),
                             "scenes": report.scene_hashes}, sort_keys=True)
    report.descriptor_hash = array_checksum([np.frombuffer(descriptor.encode("utf-8"), dtype=np.uint8)])
    return report
