import json
import numpy as np
import pytest
from plyfile import PlyData, PlyElement
from app.base.config_loader import flatten_config, load_config, parse_overrides
from app.base.exceptions import ConfigError, PlyParseError, SceneManifestError
from app.models.camera_model import Camera
from app.models.gaussian_cloud_model import GaussianCloud
from app.models.raster_model import RasterSettings
from app.models.scene_model import SceneConfig
from app.raster.rasterizer import Rasterizer
from app.scene_io.image_io import image_size, load_png, quantize, save_png
from app.scene_io.manifest import camera_extent, load_manifest, manifest_cameras, save_manifest
from app.scene_io.ply_io import attribute_names, read_ply, read_ply_with_extras, write_ply
from app.scene_io.synthetic_scene import generate_synthetic_scene, split_views
from conftest import front_camera, make_cloud


def as_float32(array: np.ndarray) -> np.ndarray:
    return np.asarray(array, dtype=np.float32).astype(np.float64)


def write_raw_ply(path, names, n=2):
    elements = np.zeros(n, dtype=[(name, "f4") for name in names])
    PlyData([PlyElement.describe(elements, "vertex")], byte_order="<").write(str(path))
    return path


class TestPly:
    def test_round_trip_at_float32(self, tmp_path, rng):
        cloud = make_cloud(rng.normal(size=(3, 3)), [0.2, 0.5, 0.9], rng.uniform(size=(3, 3)), sh_degree=1,
                           mask_logits=rng.normal(size=(3, 2)))
        cloud.sh_coeffs[:, 1:, :] = rng.normal(size=(3, 3, 3))
        cloud.rotations[:] = rng.normal(size=(3, 4))
        loaded = read_ply(write_ply(cloud, tmp_path / "cloud.ply"))
        assert loaded.n == 3 and loaded.sh_degree == 1
        for name, array in cloud.arrays().items():
            np.testing.assert_array_equal(loaded.arrays()[name], as_float32(array))

    def test_empty_cloud_round_trip(self, tmp_path):
        loaded = read_ply(write_ply(GaussianCloud.empty(sh_degree=3), tmp_path / "empty.ply"))
        assert loaded.n == 0 and loaded.sh_degree == 3
        assert loaded.sh_coeffs.shape == (0, 16, 3)
        assert loaded.mask_logits.shape == (0, 2)

    def test_extra_properties_survive(self, tmp_path):
        cloud = make_cloud([[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]], 0.5, (0.5, 0.5, 0.5))
        path = write_ply(cloud, tmp_path / "cloud.ply", extras={"confidence": np.array([0.25, 0.75])})
        _, extras = read_ply_with_extras(path)
        assert list(extras) == ["confidence"]
        np.testing.assert_array_equal(extras["confidence"], [0.25, 0.75])

    def test_missing_property_is_named(self, tmp_path):
        names = [name for name in attribute_names(4, with_masks=False) if name != "rot_3"]
        path = write_raw_ply(tmp_path / "broken.ply", names)
        with pytest.raises(PlyParseError, match="rot_3"):
            read_ply(path)

    def test_mask_logits_default_when_absent(self, tmp_path):
        path = write_raw_ply(tmp_path / "plain.ply", attribute_names(1, with_masks=False), n=3)
        cloud = read_ply(path, init_logits=(1.5, -0.5))
        np.testing.assert_array_equal(cloud.mask_logits, np.tile([1.5, -0.5], (3, 1)))

    def test_header_without_end(self, tmp_path):
        path = tmp_path / "cut.ply"
        path.write_bytes(b"ply\nformat binary_little_endian 1.0\nelement vertex 1\nproperty float x\n")
        with pytest.raises(PlyParseError, match="malformed header"):
            read_ply(path)

    def test_incomplete_sh_basis(self, tmp_path):
        names = attribute_names(1, with_masks=False) + ["f_rest_0", "f_rest_1"]
        with pytest.raises(PlyParseError, match="SH basis"):
            read_ply(write_raw_ply(tmp_path / "odd.ply", names))


class TestImages:
    def test_png_round_trip_is_8_bit(self, tmp_path, rng):
        image = rng.uniform(-0.1, 1.1, size=(5, 7, 3))
        path = save_png(image, tmp_path / "view.png")
        assert image_size(path) == (7, 5)
        np.testing.assert_array_equal(load_png(path), quantize(image) / 255.0)

    def test_quantize_rounds_to_nearest(self):
        np.testing.assert_array_equal(quantize(np.array([0.0, 0.5 / 255.0 - 1e-9, 1.2])), [0, 0, 255])


class TestManifest:
    def cameras(self):
        return [Camera.look_at([x, 0.0, -3.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0], 8, 6, 0.9) for x in (-1.0, 1.0)]

    def test_round_trip(self, tmp_path):
        save_png(np.zeros((6, 8, 3)), tmp_path / "a.png")
        path = save_manifest(self.cameras(), tmp_path / "scene.json", [0], [1], (0.1, 0.2, 0.3), ["a.png", None])
        manifest = load_manifest(path)
        assert manifest.train == [0] and manifest.eval == [1]
        assert manifest.background == (0.1, 0.2, 0.3)
        np.testing.assert_allclose(manifest_cameras(manifest)[1].world_to_camera, self.cameras()[1].world_to_camera)

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_manifest(tmp_path / "nope.json")

    def test_missing_image(self, tmp_path):
        path = save_manifest(self.cameras(), tmp_path / "scene.json", [0, 1], [], (0, 0, 0), ["gone.png", None])
        with pytest.raises(SceneManifestError, match="missing image"):
            load_manifest(path)

    def test_image_size_mismatch(self, tmp_path):
        save_png(np.zeros((4, 4, 3)), tmp_path / "small.png")
        path = save_manifest(self.cameras(), tmp_path / "scene.json", [0, 1], [], (0, 0, 0), ["small.png", None])
        with pytest.raises(SceneManifestError, match="4x4"):
            load_manifest(path)

    def test_images_required(self, tmp_path):
        path = save_manifest(self.cameras(), tmp_path / "scene.json", [0, 1], [], (0, 0, 0))
        with pytest.raises(SceneManifestError):
            load_manifest(path, require_images=True)

    def test_split_out_of_range(self, tmp_path):
        path = save_manifest(self.cameras(), tmp_path / "scene.json", [0, 1], [], (0, 0, 0))
        data = json.loads(path.read_text())
        data["eval"] = [5]
        path.write_text(json.dumps(data))
        with pytest.raises(SceneManifestError):
            load_manifest(path)

    def test_camera_extent(self):
        cameras = [Camera.look_at([x, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0], 8, 8, 0.9) for x in (-3.0, 3.0)]
        assert camera_extent(cameras) == pytest.approx(3.3)
        assert camera_extent([front_camera()]) == 1.0


class TestSyntheticScene:
    config = SceneConfig(n_gaussians=12, n_cameras=3, width=24, height=24, sh_degree=1)

    def test_deterministic(self):
        first = generate_synthetic_scene(seed=4, config=self.config)
        second = generate_synthetic_scene(seed=4, config=self.config)
        for a, b in zip(first.targets, second.targets):
            np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(first.initial_cloud.centers, second.initial_cloud.centers)
        assert first.initial_cloud.n == 12 * self.config.overprovision

    def test_split(self):
        assert split_views(2, 2) == ([0], [1])
        assert split_views(10, 2) == (list(range(8)), [8, 9])

    def test_targets_match_tiled_renderer(self):
        scene = generate_synthetic_scene(seed=9, config=self.config)
        rasterizer = Rasterizer(RasterSettings.verification(gradient_mode=False))
        for camera, target in zip(scene.cameras, scene.targets):
            frame = rasterizer.render(scene.cloud, camera, scene.background)
            np.testing.assert_allclose(frame.color, target, atol=1e-5)


class TestConfigLoader:
    def test_file_then_overrides(self, tmp_path):
        path = tmp_path / "run.env"
        path.write_text("mask.temperature=0.3\ntrain.iterations=12\nraster.mode=mask_opacity\n")
        config = load_config(path, {"train.iterations": "30"})
        assert config.mask.temperature == 0.3
        assert config.train.iterations == 30
        assert config.raster.mode.value == "mask_opacity"

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            load_config(None, {"mask.temprature": "0.3"})

    def test_key_without_section(self):
        with pytest.raises(ConfigError):
            load_config(None, {"iterations": "3"})

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_config(tmp_path / "missing.env")

    def test_parse_overrides(self):
        assert parse_overrides(["mask.lambda=0.01", "train.seed = 3"]) == {"mask.lambda": "0.01", "train.seed": "3"}
        with pytest.raises(ConfigError):
            parse_overrides(["mask.lambda"])

    def test_flatten_uses_dotted_aliases(self):
        flat = flatten_config(load_config(None, {"mask.lambda": "0.002"}))
        assert flat["mask.lambda"] == 0.002
        assert flat["train.densify.interval"] == 100
