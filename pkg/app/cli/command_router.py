import logging
import sys
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional
import numpy as np
from tabulate import tabulate
from app.base.config_loader import flatten_config, load_config, parse_overrides
from app.base.exceptions import ConfigError, VerificationError
from app.constants.app_messages import AppMessages
from app.constants.directory_names import DirectoryNames
from app.enums.cli_command import CliCommand
from app.enums.env_keys import EnvKeys
from app.cli.cli_parser import build_parser
from app.models.config_model import AppConfig
from app.models.mask_model import MaskSample
from app.models.report_model import ReportEnvelope
from app.models.scene_model import SceneConfig
from app.raster.binning import bin_and_sort
from app.raster.rasterizer import Rasterizer
from app.scene_io.image_io import save_png
from app.scene_io.manifest import camera_extent, load_manifest, manifest_cameras, manifest_images
from app.scene_io.ply_io import read_ply, write_ply
from app.scene_io.synthetic_scene import generate_synthetic_scene, ground_truth_cloud, ring_cameras
from app.trainer.trainer import run_training, train_on_scene
from app.utils.get_current_timestamp import calculate_elapsed_time
from app.utils.utility_manager import UtilityManager
from app.verify.gradcheck_suite import gradcheck_suite
from app.verify.naive_renderer import naive_render
from app.verify.sampler_stats import sampler_stats

logger = logging.getLogger(__name__)


class CommandRouter(UtilityManager):
    """Maps each subcommand to a handler that returns a ReportEnvelope."""

    def __init__(self) -> None:
        super().__init__()
        self.parser = build_parser()
        self.handlers: Dict[str, Callable] = {}
        self.setup_commands()

    def output_root(self) -> Path:
        return Path(self.get_env_variable(EnvKeys.OUTPUT_DIR.value, default=DirectoryNames.OUTPUT))

    def config_from(self, args, extra: Optional[Dict[str, object]] = None) -> AppConfig:
        overrides = {key: value for key, value in (extra or {}).items() if value is not None}
        overrides.update(parse_overrides(args.overrides))
        return load_config(args.config, overrides)

    def emit(self, envelope: ReportEnvelope, out: Optional[str]) -> int:
        text = envelope.model_dump_json(indent=2)
        sys.stdout.write(text + "\n")
        if out:
            self.atomic_write_text(out, text)
        return envelope.exit_code

    def setup_commands(self) -> None:
        @self.catch_cli_exceptions(CliCommand.TRAIN.value)
        def train(args) -> int:
            started = time.perf_counter()
            config = self.config_from(args, {
                "train.preset": args.preset, "train.iterations": args.iterations, "train.seed": args.seed,
                "train.progress": "false" if args.no_progress else None,
            })
            output = Path(args.output) if args.output else self.output_root() / "train"
            if args.manifest:
                if not args.ply:
                    raise ConfigError("--manifest needs an initial cloud via --ply")
                manifest = load_manifest(args.manifest, require_images=True)
                report, cloud = run_training(
                    read_ply(args.ply, config.mask.init_logits), manifest_cameras(manifest),
                    manifest_images(manifest, args.manifest), config,
                    train_index=manifest.train, eval_index=manifest.eval,
                    background=manifest.background, extent=camera_extent(manifest_cameras(manifest)),
                    output_dir=output)
            else:
                scene = generate_synthetic_scene(config=config.scene, init_logits=config.mask.init_logits)
                report, cloud = train_on_scene(scene, config, output_dir=output)
            ply_path = write_ply(cloud, output / "point_cloud.ply")
            data = report.model_dump(mode="json")
            data.update(ply=str(ply_path), metrics=str(output / "metrics.csv"))
            envelope = ReportEnvelope(command=CliCommand.TRAIN.value, config=flatten_config(config), data=data,
                                      elapsed_seconds=calculate_elapsed_time(started))
            self.atomic_write_text(output / "report.json", envelope.model_dump_json(indent=2))
            return self.emit(envelope, args.out)

        @self.catch_cli_exceptions(CliCommand.RENDER.value)
        def render(args) -> int:
            started = time.perf_counter()
            config = self.config_from(args, {"raster.gradient_mode": "false"})
            cloud = read_ply(args.ply, config.mask.init_logits)
            manifest = load_manifest(args.manifest)
            rasterizer = Rasterizer(config.raster)
            output = Path(args.output) if args.output else self.output_root() / DirectoryNames.RENDERS
            written = []
            for index, camera in enumerate(manifest_cameras(manifest)):
                frame = rasterizer.render(cloud, camera, manifest.background, MaskSample.ones(cloud.n))
                written.append(str(save_png(frame.color, output / f"view_{index:03d}.png")))
            envelope = ReportEnvelope(command=CliCommand.RENDER.value, config=flatten_config(config),
                                      data={"gaussians": cloud.n, "images": written},
                                      elapsed_seconds=calculate_elapsed_time(started))
            return self.emit(envelope, args.out)

        @self.catch_cli_exceptions(CliCommand.PRUNE.value)
        def prune(args) -> int:
            started = time.perf_counter()
            extra = {"train.iterations": args.iterations, "train.densify.enabled": "false",
                     "train.checkpoint_interval": "0"}
            if not args.all_params:
                extra.update({f"train.learning_rates.{name}": "0" for name in
                              ("position_init", "position_final", "sh_dc", "sh_rest",
                               "opacity", "scaling", "rotation")})
            config = self.config_from(args, extra)
            cloud = read_ply(args.ply, config.mask.init_logits)
            manifest = load_manifest(args.manifest, require_images=True)
            report, pruned = run_training(cloud, manifest_cameras(manifest), manifest_images(manifest, args.manifest),
                                          config, train_index=manifest.train, eval_index=manifest.eval,
                                          background=manifest.background,
                                          extent=camera_extent(manifest_cameras(manifest)))
            ply_path = write_ply(pruned, args.output)
            data = report.model_dump(mode="json")
            data["ply"] = str(ply_path)
            envelope = ReportEnvelope(command=CliCommand.PRUNE.value, config=flatten_config(config), data=data,
                                      elapsed_seconds=calculate_elapsed_time(started))
            return self.emit(envelope, args.out)

        @self.catch_cli_exceptions(CliCommand.GRADCHECK.value)
        def gradcheck(args) -> int:
            started = time.perf_counter()
            config = self.config_from(args, {"verify.seed": args.seed, "verify.n_scenes": args.scenes,
                                             "verify.precision": args.precision})
            verify = config.verify
            report = gradcheck_suite(verify.seed, verify.n_scenes, verify.tolerances, config=verify)
            if not report.passed:
                raise VerificationError(AppMessages.GRADCHECK_FAILED, report)
            message = AppMessages.GRADCHECK_PASSED if verify.n_scenes else AppMessages.EMPTY_GRADCHECK
            envelope = ReportEnvelope(command=CliCommand.GRADCHECK.value, message=message,
                                      config=flatten_config(config), data=report.model_dump(mode="json"),
                                      elapsed_seconds=calculate_elapsed_time(started))
            return self.emit(envelope, args.out)

        @self.catch_cli_exceptions(CliCommand.BENCH.value)
        def bench(args) -> int:
            started = time.perf_counter()
            config = self.config_from(args, {"scene.n_gaussians": args.gaussians, "scene.width": args.width,
                                             "scene.height": args.height})
            data = run_bench(config, max(1, args.repeats))
            sys.stderr.write(tabulate(data["table"], headers="keys", floatfmt=".4g") + "\n")
            envelope = ReportEnvelope(command=CliCommand.BENCH.value, config=flatten_config(config), data=data,
                                      elapsed_seconds=calculate_elapsed_time(started))
            return self.emit(envelope, args.out)

        @self.catch_cli_exceptions(CliCommand.STATS.value)
        def stats(args) -> int:
            started = time.perf_counter()
            config = self.config_from(args, {"verify.sampler_draws": args.draws, "mask.temperature": args.temperature,
                                             "verify.seed": args.seed})
            try:
                gaps = [float(part) for part in args.gaps.split(",") if part.strip()]
            except ValueError as err:
                raise ConfigError(f"--gaps must be comma-separated numbers: {err}") from err
            logits = np.column_stack([gaps, np.zeros(len(gaps))])
            report = sampler_stats(logits, config.mask.temperature, config.verify.sampler_draws,
                                   config.verify.seed, config.verify.sampler_z_limit)
            sys.stderr.write(tabulate([entry.model_dump() for entry in report.entries], headers="keys",
                                      floatfmt=".5g") + "\n")
            if not report.passed:
                raise VerificationError(AppMessages.SAMPLER_FAILED, report)
            envelope = ReportEnvelope(command=CliCommand.STATS.value, message=AppMessages.SAMPLER_PASSED,
                                      config=flatten_config(config), data=report.model_dump(mode="json"),
                                      elapsed_seconds=calculate_elapsed_time(started))
            return self.emit(envelope, args.out)

        self.handlers = {CliCommand.TRAIN.value: train, CliCommand.RENDER.value: render,
                         CliCommand.PRUNE.value: prune, CliCommand.GRADCHECK.value: gradcheck,
                         CliCommand.BENCH.value: bench, CliCommand.STATS.value: stats}

    def run(self, argv: Optional[List[str]] = None) -> int:
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as exit_request:
            return int(exit_request.code or 0)
        return self.handlers[args.command](args)


def _timed(func: Callable, repeats: int):
    result = None
    start = time.perf_counter()
    for _ in range(repeats):
        result = func()
    return (time.perf_counter() - start) / repeats, result


def run_bench(config: AppConfig, repeats: int) -> dict:
    """Per-stage timing of the tiled renderer and the naive forward on one reference view."""
    scene_config: SceneConfig = config.scene
    cloud = ground_truth_cloud(np.random.default_rng(scene_config.seed), scene_config)
    camera = ring_cameras(scene_config)[0]
    background = np.asarray(scene_config.background)
    gradient_mode = config.raster.gradient_mode
    rasterizer = Rasterizer(config.raster)
    rasterizer.warmup()
    # backward always needs a frame with contributor records
    recording = rasterizer if gradient_mode else Rasterizer(config.raster.model_copy(update={"gradient_mode": True}))
    if not gradient_mode:
        recording.warmup()
    masks = MaskSample.ones(cloud.n)

    t_project, splats = _timed(lambda: rasterizer.project(cloud, camera), repeats)
    t_bin, _ = _timed(lambda: bin_and_sort(splats, camera, config.raster.tile_size), repeats)
    t_forward, frame = _timed(lambda: rasterizer.render_masked(splats, masks, camera, background), repeats)
    recorded = frame if gradient_mode else recording.render_masked(splats, masks, camera, background)
    d_image = np.ones_like(recorded.color, dtype=np.float64)
    t_backward, _ = _timed(lambda: recording.backward(recorded, d_image, cloud, camera), repeats)
    t_naive, _ = _timed(lambda: naive_render(cloud, None, camera, background), 1)

    pixels = camera.width * camera.height
    table = [
        {"stage": "project", "seconds": t_project},
        {"stage": "bin", "seconds": t_bin},
        {"stage": "forward (tiled)", "seconds": t_forward},
        {"stage": "backward (tiled)", "seconds": t_backward},
        {"stage": "forward (naive)", "seconds": t_naive},
    ]
    return {
        "gaussians": cloud.n,
        "width": camera.width,
        "height": camera.height,
        "repeats": repeats,
        "forward_gradient_mode": gradient_mode,
        "forward_records": frame.record_entry is not None,
        "renders_per_second": 1.0 / t_forward if t_forward > 0 else float("inf"),
        "pixels_per_second": pixels / t_forward if t_forward > 0 else float("inf"),
        "naive_speedup": t_naive / t_forward if t_forward > 0 else float("inf"),
        "table": table,
    }


def cli(argv: Optional[List[str]] = None) -> int:
    return CommandRouter().run(argv)
