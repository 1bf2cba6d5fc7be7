import json
import numpy as np
import pytest
from app.base.config_loader import load_config
from app.cli.command_router import cli, run_bench
from app.constants.exit_codes import ExitCodes
from app.models.gaussian_cloud_model import GaussianCloud
from app.models.scene_model import SceneConfig
from app.scene_io.image_io import load_png, quantize, save_png
from app.scene_io.manifest import save_manifest
from app.scene_io.ply_io import read_ply, write_ply
from app.scene_io.synthetic_scene import generate_synthetic_scene
from app.trainer.schedules import LambdaSchedule
from conftest import front_camera

SMALL_TRAIN = ["--set", "scene.n_gaussians=6", "--set", "scene.n_cameras=3", "--set", "scene.width=16",
               "--set", "scene.height=16", "--set", "scene.sh_degree=0", "--set", "train.eval_interval=10",
               "--set", "train.checkpoint_interval=0", "--set", "train.densify.start=4",
               "--set", "train.densify.interval=4", "--set", "train.densify.stop=8"]


def envelope(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def scene_folder(tmp_path, init_logits=(3.0, 0.0)):
    scene = generate_synthetic_scene(config=SceneConfig(n_gaussians=6, n_cameras=3, width=16, height=16,
                                                        sh_degree=0), init_logits=init_logits)
    images = []
    for index, target in enumerate(scene.targets):
        save_png(target, tmp_path / f"target_{index}.png")
        images.append(f"target_{index}.png")
    manifest = save_manifest(scene.cameras, tmp_path / "scene.json", scene.train_index, scene.eval_index,
                             scene.background, images)
    ply = write_ply(scene.initial_cloud, tmp_path / "initial.ply")
    return scene, manifest, ply


class TestGradcheckCommand:
    def test_passes(self, capsys):
        code = cli(["gradcheck", "--seed", "7", "--scenes", "2", "--set", "verify.max_gaussians=12",
                    "--set", "verify.width=16", "--set", "verify.height=16", "--set", "verify.entries_per_class=4"])
        report = envelope(capsys)
        assert code == ExitCodes.SUCCESS
        assert report["status"] == "SUCCESS"
        assert report["data"]["passed"] is True
        assert report["config"]["verify.seed"] == 7

    def test_zero_scenes_warns(self, capsys):
        assert cli(["gradcheck", "--scenes", "0"]) == ExitCodes.SUCCESS
        assert envelope(capsys)["data"]["warnings"]

    def test_version(self, capsys):
        assert cli(["--version"]) == ExitCodes.SUCCESS
        assert "1.0.0" in capsys.readouterr().out

    def test_unknown_flag(self, capsys):
        assert cli(["gradcheck", "--bogus"]) == ExitCodes.USAGE

    def test_bad_config_key(self, capsys):
        assert cli(["gradcheck", "--scenes", "0", "--set", "verify.nope=1"]) == ExitCodes.USAGE
        report = envelope(capsys)
        assert report["status"] == "FAILED" and report["error"] == "ConfigError"


class TestRenderCommand:
    def test_empty_cloud_renders_background(self, tmp_path, capsys):
        ply = write_ply(GaussianCloud.empty(), tmp_path / "empty.ply")
        manifest = save_manifest([front_camera(), front_camera(12, 10)], tmp_path / "scene.json", [0, 1], [],
                                 (0.2, 0.4, 0.6))
        code = cli(["render", "--ply", str(ply), "--manifest", str(manifest), "--output", str(tmp_path / "out")])
        report = envelope(capsys)
        assert code == ExitCodes.SUCCESS
        assert len(report["data"]["images"]) == 2
        image = load_png(report["data"]["images"][1])
        assert image.shape == (10, 12, 3)
        np.testing.assert_array_equal(image, np.broadcast_to(quantize([0.2, 0.4, 0.6]) / 255.0, (10, 12, 3)))

    def test_missing_ply(self, tmp_path, capsys):
        code = cli(["render", "--ply", str(tmp_path / "missing.ply"), "--manifest", str(tmp_path / "scene.json"),
                    "--output", str(tmp_path)])
        assert code == ExitCodes.IO
        assert envelope(capsys)["error"] == "FileNotFoundError"

    def test_corrupt_ply(self, tmp_path, capsys):
        (tmp_path / "bad.ply").write_bytes(b"ply\nformat ascii 1.0\n")
        code = cli(["render", "--ply", str(tmp_path / "bad.ply"), "--manifest", str(tmp_path / "scene.json"),
                    "--output", str(tmp_path)])
        assert code == ExitCodes.IO
        assert envelope(capsys)["error"] == "PlyParseError"


class TestTrainCommand:
    def test_preset_run(self, tmp_path, capsys):
        output = tmp_path / "run"
        code = cli(["train", "--preset", "ours-beta", "--iterations", "12", "--no-progress",
                    "--output", str(output)] + SMALL_TRAIN)
        report = envelope(capsys)
        assert code == ExitCodes.SUCCESS
        assert report["config"]["train.preset"] == "ours-beta"
        assert report["data"]["iterations"] == 12
        for name in ("point_cloud.ply", "metrics.csv", "report.json", "point_cloud_final.ply"):
            assert (output / name).exists()
        assert read_ply(output / "point_cloud.ply").n == report["data"]["final_gaussian_count"]

        config = load_config(None, {"train.preset": "ours-beta"})
        assert LambdaSchedule(config.train, config.mask)(0) == 0.0005

    def test_manifest_without_ply(self, tmp_path, capsys):
        _, manifest, _ = scene_folder(tmp_path)
        code = cli(["train", "--manifest", str(manifest), "--output", str(tmp_path / "run")])
        assert code == ExitCodes.USAGE

    def test_manifest_run(self, tmp_path, capsys):
        scene, manifest, ply = scene_folder(tmp_path)
        code = cli(["train", "--manifest", str(manifest), "--ply", str(ply), "--iterations", "6", "--no-progress",
                    "--output", str(tmp_path / "run")] + SMALL_TRAIN)
        assert code == ExitCodes.SUCCESS
        assert envelope(capsys)["data"]["initial_gaussian_count"] == scene.initial_cloud.n


class TestPruneCommand:
    def test_prunes_with_mask_only_updates(self, tmp_path, capsys):
        scene, manifest, ply = scene_folder(tmp_path, init_logits=(-3.0, 0.0))
        output = tmp_path / "pruned.ply"
        code = cli(["prune", "--ply", str(ply), "--manifest", str(manifest), "--iterations", "10",
                    "--output", str(output), "--set", "train.progress=false"])
        report = envelope(capsys)
        assert code == ExitCodes.SUCCESS
        pruned = read_ply(output)
        assert pruned.n == report["data"]["final_gaussian_count"] < scene.initial_cloud.n
        initial = scene.initial_cloud.centers.astype(np.float32).astype(np.float64)
        for row in pruned.centers:
            assert np.any(np.all(initial == row, axis=1))


class TestStatsCommand:
    def test_passes(self, capsys):
        code = cli(["stats", "--gaps", "0,1.0986,3", "--draws", "20000", "--seed", "2"])
        report = envelope(capsys)
        assert code == ExitCodes.SUCCESS
        assert len(report["data"]["entries"]) == 3

    def test_bad_gaps(self, capsys):
        assert cli(["stats", "--gaps", "0,abc"]) == ExitCodes.USAGE


class TestBenchCommand:
    @pytest.mark.parametrize("gradient_mode", [False, True])
    def test_forward_honours_gradient_mode(self, gradient_mode):
        config = load_config(None, {"scene.n_gaussians": 8, "scene.width": 16, "scene.height": 16,
                                    "raster.gradient_mode": str(gradient_mode).lower()})
        result = run_bench(config, repeats=1)
        assert result["forward_gradient_mode"] is gradient_mode
        assert result["forward_records"] is gradient_mode
        assert [row["stage"] for row in result["table"]][2:4] == ["forward (tiled)", "backward (tiled)"]


@pytest.mark.slow
def test_bench_tiled_beats_naive():
    config = load_config(None, {"scene.n_gaussians": 10000, "scene.width": 256, "scene.height": 256,
                                "raster.gradient_mode": "false"})
    result = run_bench(config, repeats=1)
    assert result["naive_speedup"] >= 2.0
