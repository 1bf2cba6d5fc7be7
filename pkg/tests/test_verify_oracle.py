import numpy as np
import pytest
from app.enums.gradient_class import GradientClass
from app.enums.raster_mode import RasterMode
from app.models.gaussian_cloud_model import GaussianCloud
from app.models.verify_model import VerifyConfig
from app.verify.finite_diff import ParamSelector, finite_diff, numeric_gradient
from app.verify.gradcheck_suite import gradcheck_suite, relative_error
from app.verify.naive_renderer import naive_render, naive_render_with_signature
from conftest import make_cloud

FAST = VerifyConfig(max_gaussians=12, width=16, height=16, entries_per_class=4)


class TestNaiveRenderer:
    def test_fractional_mask(self, camera):
        cloud = make_cloud([[0.0, 0.0, 0.0]], 0.6, (1.0, 0.0, 0.0))
        frame = naive_render(cloud, [0.5], camera, np.zeros(3))
        np.testing.assert_allclose(frame.color[4, 4], [0.3, 0.0, 0.0], atol=1e-12)
        assert frame.final_transmittance[4, 4] == pytest.approx(0.7)

    def test_fractional_mask_times_opacity(self, camera):
        cloud = make_cloud([[0.0, 0.0, 0.0]], 0.6, (1.0, 0.0, 0.0))
        frame = naive_render(cloud, [0.5], camera, np.zeros(3), mode=RasterMode.MASK_OPACITY)
        np.testing.assert_allclose(frame.color[4, 4], [0.3, 0.0, 0.0], atol=1e-12)
        assert frame.final_transmittance[4, 4] == pytest.approx(0.7)

    def test_empty_cloud_is_background(self, camera):
        frame = naive_render(GaussianCloud.empty(), None, camera, [0.1, 0.2, 0.3])
        np.testing.assert_allclose(frame.color, np.broadcast_to([0.1, 0.2, 0.3], (9, 9, 3)))

    def test_signature_counts_clamped_pairs(self, camera):
        cloud = make_cloud([[0.0, 0.0, 0.0]], 0.999, (1.0, 0.0, 0.0))
        _, signature = naive_render_with_signature(cloud, None, camera, np.zeros(3))
        assert signature.clamped_pairs >= 1
        assert signature.n_contrib[4, 4] == 1

    def test_mask_length_checked(self, camera):
        with pytest.raises(ValueError):
            naive_render(make_cloud([[0.0, 0.0, 0.0]], 0.6, (1.0, 0.0, 0.0)), [1.0, 1.0], camera, np.zeros(3))


class TestFiniteDiff:
    def test_central_difference(self):
        x = np.array([3.0])
        result = finite_diff(ParamSelector(x, 0), lambda: x[0] ** 2)
        assert result.value == pytest.approx(6.0, abs=1e-9)
        assert not result.flagged
        assert x[0] == 3.0

    def test_one_sided(self):
        x = np.array([3.0])
        forward = finite_diff(ParamSelector(x, 0), lambda: x[0] ** 2, direction=1)
        backward = finite_diff(ParamSelector(x, 0), lambda: x[0] ** 2, direction=-1)
        assert forward.value > 6.0 > backward.value
        assert forward.value == pytest.approx(6.0, rel=1e-4)

    def test_non_finite_is_flagged(self):
        x = np.array([1.0])
        result = finite_diff(ParamSelector(x, 0), lambda: np.log(x[0] - 1.0))
        assert result.flagged and result.reason == "non-finite"

    def test_signature_change_is_flagged(self):
        x = np.array([3.0])
        result = finite_diff(ParamSelector(x, 0), lambda: (abs(x[0] - 3.0), x[0] > 3.0))
        assert result.flagged and result.reason == "discontinuity"

    def test_step_must_be_positive(self):
        with pytest.raises(ValueError):
            finite_diff(ParamSelector(np.zeros(1), 0), lambda: 0.0, h=0.0)

    def test_numeric_gradient(self):
        x = np.array([[1.0, -2.0], [0.5, 3.0]])
        np.testing.assert_allclose(numeric_gradient(lambda v: float(np.sum(v ** 3)), x), 3.0 * x ** 2, rtol=1e-8)

    def test_relative_error_floor(self):
        assert relative_error(1e-9, 0.0, 1e-6) == pytest.approx(1e-3)
        assert relative_error(2.0, 1.0, 1e-6) == pytest.approx(0.5)


class TestGradCheckSuite:
    def test_correct_gradients_pass(self):
        report = gradcheck_suite(seed=7, n_scenes=2, config=FAST)
        assert report.passed, report.classes
        assert set(report.classes) == {grad_class.value for grad_class in GradientClass}
        assert sum(result.checked for result in report.classes.values()) > 0

    def test_deterministic(self):
        first = gradcheck_suite(seed=3, n_scenes=2, config=FAST)
        second = gradcheck_suite(seed=3, n_scenes=2, config=FAST)
        assert first.scene_hashes == second.scene_hashes
        assert first.descriptor_hash == second.descriptor_hash
        assert first.model_dump() == second.model_dump()

    def test_flipped_mask_gradient_is_caught(self):
        report = gradcheck_suite(seed=7, n_scenes=2, config=FAST,
                                 analytic_transform=lambda g: g.model_copy(update={"d_mask_soft": -g.d_mask_soft}))
        assert not report.passed
        assert not report.classes[GradientClass.MASK_SOFT.value].passed
        assert report.classes[GradientClass.CENTERS.value].passed

    def test_scaled_gradients_are_caught(self):
        report = gradcheck_suite(seed=7, n_scenes=2, config=FAST, analytic_transform=lambda g: g.scaled(1.01))
        assert not report.passed

    def test_zero_scenes(self):
        report = gradcheck_suite(seed=0, n_scenes=0)
        assert report.passed
        assert report.warnings
        assert report.classes == {}

    @pytest.mark.slow
    def test_full_suite(self):
        report = gradcheck_suite(seed=0, n_scenes=20)
        assert report.passed, report.classes
