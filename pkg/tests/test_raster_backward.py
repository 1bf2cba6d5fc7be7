import numpy as np
import pytest
from app.base.exceptions import InvalidArgumentError
from app.enums.raster_mode import RasterMode
from app.models.mask_model import MaskSample
from app.models.raster_model import RasterSettings
from app.raster.backward import backward_pixel
from app.raster.rasterizer import Rasterizer
from app.verify.finite_diff import ParamSelector, finite_diff
from app.verify.random_scene import random_verification_scene
from conftest import front_camera, make_cloud

ONES = np.ones(3)


def single(mask: float) -> dict:
    return {"alpha": [0.5], "transmittance": [1.0], "mask": [mask], "color": [[1.0, 0.0, 0.0]]}


def composite(alphas, masks, colors, background) -> np.ndarray:
    color, trans = np.zeros(3), 1.0
    for alpha, mask, c in zip(alphas, masks, colors):
        color += mask * alpha * trans * np.asarray(c)
        trans *= 1.0 - mask * alpha
    return color + trans * np.asarray(background)


def asymmetry_scene(seed: int):
    """A bright front Gaussian over two darker ones behind it."""
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0, -0.5],
                        [rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), 0.3],
                        [rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), 0.5]])
    colors = np.vstack([rng.uniform(0.8, 0.9, 3), rng.uniform(0.1, 0.3, (2, 3))])
    cloud = make_cloud(centers, rng.uniform(0.3, 0.8, 3), colors, scales=rng.uniform(0.1, 0.2, 3), sh_degree=1)
    cloud.sh_coeffs[:, 1:, :] = rng.uniform(-0.01, 0.01, (3, 3, 3))
    cloud.rotations[:] = rng.normal(size=(3, 4))
    return cloud


class TestBackwardPixel:
    def test_single_splat(self):
        grads = backward_pixel(single(1.0), ONES, np.zeros(3))
        assert grads["mask"][0] == pytest.approx(0.5)

    def test_masked_splat_gets_existence_gradient(self):
        grads = backward_pixel(single(0.0), ONES, np.zeros(3))
        assert grads["mask"][0] == pytest.approx(0.5)
        assert grads["alpha"][0] == 0.0
        np.testing.assert_array_equal(grads["color"], np.zeros((1, 3)))

    def test_background_term(self):
        grads = backward_pixel(single(1.0), ONES, ONES)
        assert grads["mask"][0] == pytest.approx(-1.0)

    def test_two_splats_against_finite_differences(self):
        alphas, colors = [0.4, 0.7], [[0.9, 0.2, 0.1], [0.1, 0.6, 0.8]]
        background, d_color = np.array([0.3, 0.5, 0.2]), np.array([0.7, -0.4, 1.1])
        masks = np.array([0.6, 0.3])
        contributors = {"alpha": alphas, "transmittance": [1.0, 1.0 - masks[0] * alphas[0]],
                        "mask": masks, "color": colors}
        grads = backward_pixel(contributors, d_color, background)
        for k in range(2):
            numeric = finite_diff(ParamSelector(masks, k),
                                  lambda: float(d_color @ composite(alphas, masks, colors, background)))
            assert grads["mask"][k] == pytest.approx(numeric.value, rel=1e-6)

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            backward_pixel({"alpha": [0.5, 0.5], "transmittance": [1.0], "mask": [1.0],
                            "color": [[1.0, 0.0, 0.0]]}, ONES, ONES)


class TestMaskedGradientAsymmetry:
    camera = front_camera(16, 16)

    def gradients(self, seed: int, mode: RasterMode):
        cloud = asymmetry_scene(seed)
        rasterizer = Rasterizer(RasterSettings.verification(mode=mode))
        frame = rasterizer.render(cloud, self.camera, np.zeros(3), MaskSample.from_hard([0.0, 1.0, 1.0]))
        return rasterizer.backward(frame, np.ones((16, 16, 3)), cloud, self.camera)

    @pytest.mark.parametrize("seed", range(20))
    def test_masked_blend(self, seed):
        grads = self.gradients(seed, RasterMode.MASKED_BLEND)
        assert grads.d_mask_soft[0] > 1e-8
        assert grads.d_opacity_logits[0] == 0.0
        for array in (grads.d_centers, grads.d_log_scales, grads.d_rotations, grads.d_sh):
            np.testing.assert_array_equal(array[0], np.zeros_like(array[0]))
        assert np.any(grads.d_centers[1:] != 0.0)

    @pytest.mark.parametrize("seed", range(20))
    def test_mask_opacity(self, seed):
        grads = self.gradients(seed, RasterMode.MASK_OPACITY)
        for array in grads.by_class().values():
            np.testing.assert_array_equal(array[0], np.zeros_like(array[0]))


class TestRasterizeBackward:
    def render(self, scene, settings=None):
        rasterizer = Rasterizer(settings or RasterSettings.verification())
        frame = rasterizer.render(scene.cloud, scene.camera, scene.background, MaskSample.relaxed(scene.masks))
        return rasterizer, frame

    def test_zero_upstream_gives_zero_gradients(self, rng):
        scene = random_verification_scene(rng, max_gaussians=16)
        rasterizer, frame = self.render(scene)
        grads = rasterizer.backward(frame, np.zeros_like(frame.color), scene.cloud, scene.camera)
        for array in grads.by_class().values():
            np.testing.assert_array_equal(array, np.zeros_like(array))

    def test_quaternion_gradient_is_tangent(self, rng):
        scene = random_verification_scene(rng, max_gaussians=16)
        rasterizer, frame = self.render(scene)
        grads = rasterizer.backward(frame, scene.weights, scene.cloud, scene.camera)
        radial = np.sum(grads.d_rotations * scene.cloud.normalized_rotations(), axis=1)
        scale = np.max(np.abs(grads.d_rotations)) + 1e-300
        np.testing.assert_allclose(radial / scale, 0.0, atol=1e-10)

    def test_needs_gradient_mode(self, rng):
        scene = random_verification_scene(rng, max_gaussians=8)
        rasterizer, frame = self.render(scene, RasterSettings.verification(gradient_mode=False))
        with pytest.raises(InvalidArgumentError):
            rasterizer.backward(frame, scene.weights, scene.cloud, scene.camera)

    def test_upstream_shape_checked(self, rng):
        scene = random_verification_scene(rng, max_gaussians=8)
        rasterizer, frame = self.render(scene)
        with pytest.raises(InvalidArgumentError):
            rasterizer.backward(frame, np.ones((2, 2, 3)), scene.cloud, scene.camera)

    def test_float32_close_to_float64(self, rng):
        scene = random_verification_scene(rng, max_gaussians=16)
        _, high_frame = self.render(scene)
        high = Rasterizer(RasterSettings.verification()).backward(high_frame, scene.weights, scene.cloud,
                                                                   scene.camera)
        low_rasterizer, low_frame = self.render(scene, RasterSettings.verification(precision="float32"))
        low = low_rasterizer.backward(low_frame, scene.weights, scene.cloud, scene.camera)
        scale = np.max(np.abs(high.d_mask_soft))
        np.testing.assert_allclose(low.d_mask_soft, high.d_mask_soft, atol=5e-2 * scale)
