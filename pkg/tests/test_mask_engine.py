import numpy as np
import pytest
from app.base.exceptions import InvalidArgumentError
from app.enums.mask_loss_kind import MaskLossKind
from app.enums.mask_mode import MaskMode
from app.mask.loss import mask_loss
from app.mask.pruning import prune_below_threshold, prune_never_sampled
from app.mask.sampling import draw_masks, existence_prob, mask_logit_grads, sample_masks, ste_masks
from app.models.mask_model import MaskConfig, MaskSample
from app.verify.finite_diff import ParamSelector, finite_diff
from app.verify.sampler_stats import sampler_stats


def repeated(logits, n):
    return np.tile(np.asarray(logits, dtype=np.float64), (n, 1))


def logits_for(p: float, n: int) -> np.ndarray:
    return repeated([np.log(p / (1.0 - p)), 0.0], n)


class TestExistenceProb:
    @pytest.mark.parametrize("logits,expected", [((0.0, 0.0), 0.5), ((np.log(3.0), 0.0), 0.75)])
    def test_softmax(self, logits, expected):
        assert existence_prob(np.array([logits]))[0] == pytest.approx(expected, abs=1e-12)

    def test_saturation(self):
        assert existence_prob(np.array([[20.0, -20.0]]))[0] == pytest.approx(1.0, abs=1e-12)


class TestSampleMasks:
    def test_saturated_logits_always_present(self):
        sample = sample_masks(repeated([30.0, -30.0], 10000), temperature=0.5, seed=3)
        assert np.all(sample.hard == 1.0)

    @pytest.mark.parametrize("logits,expected,bound", [((0.0, 0.0), 0.5, 0.005),
                                                       ((np.log(3.0), 0.0), 0.75, 0.0045)])
    def test_empirical_frequency(self, logits, expected, bound):
        sample = sample_masks(repeated(logits, 100000), temperature=0.5, seed=11)
        assert abs(sample.hard.mean() - expected) < bound

    def test_same_seed_same_sample(self):
        logits = np.random.default_rng(0).normal(size=(50, 2))
        first, second = sample_masks(logits, 0.5, seed=9), sample_masks(logits, 0.5, seed=9)
        np.testing.assert_array_equal(first.hard, second.hard)
        np.testing.assert_array_equal(first.soft, second.soft)

    def test_hard_and_soft_share_noise(self):
        sample = sample_masks(np.random.default_rng(1).normal(size=(200, 2)), 0.5, seed=2)
        np.testing.assert_array_equal(sample.hard, (sample.soft > 0.5).astype(np.float64))

    def test_low_temperature_soft_approaches_hard(self):
        sample = sample_masks(repeated([2.0, 0.0], 10000), temperature=0.01, seed=5)
        assert np.mean(np.abs(sample.soft - sample.hard)) < 0.05

    def test_rejects_non_positive_temperature(self):
        with pytest.raises(ValueError):
            sample_masks(repeated([0.0, 0.0], 3), temperature=0.0)

    def test_logit_gradient_is_antisymmetric(self):
        sample = sample_masks(np.random.default_rng(4).normal(size=(20, 2)), 0.5, seed=4)
        grads = mask_logit_grads(sample, np.ones(20))
        np.testing.assert_allclose(grads[:, 0], -grads[:, 1])
        np.testing.assert_allclose(grads[:, 0], sample.soft * (1.0 - sample.soft) / 0.5)


class TestSteMasks:
    @pytest.mark.parametrize("p,hard", [(0.6, 1.0), (0.5, 1.0), (0.49, 0.0)])
    def test_threshold(self, p, hard):
        sample = ste_masks(logits_for(p, 1), threshold=0.5)
        assert sample.hard[0] == hard
        assert sample.soft[0] == pytest.approx(p)

    def test_draw_masks_dispatch(self):
        logits = repeated([0.0, 0.0], 4)
        assert draw_masks(logits, MaskConfig(mode=MaskMode.STE)).mode is MaskMode.STE
        all_on = draw_masks(logits, MaskConfig(mode=MaskMode.ALL_ON))
        np.testing.assert_array_equal(all_on.hard, np.ones(4))
        np.testing.assert_array_equal(all_on.soft_slope, np.zeros(4))


class TestMaskLoss:
    def test_all_present(self):
        assert mask_loss(MaskSample.from_hard(np.ones(8)))[0] == pytest.approx(1.0)

    def test_half_present(self):
        assert mask_loss(MaskSample.from_hard([1.0, 0.0, 1.0, 0.0]))[0] == pytest.approx(0.25)

    def test_squared_is_l1_squared_for_equal_masks(self):
        sample = MaskSample.relaxed(np.full(6, 0.3))
        squared, _ = mask_loss(sample, MaskLossKind.SQUARED)
        l1, _ = mask_loss(sample, MaskLossKind.L1)
        assert squared == pytest.approx(l1 ** 2)

    def test_squared_gradient_matches_finite_differences(self):
        values = np.array([0.2, 0.9, 0.5, 0.7])
        _, grad = mask_loss(MaskSample.relaxed(values))
        np.testing.assert_allclose(grad, np.full(4, 2.0 * values.mean() / 4))
        for i in range(4):
            numeric = finite_diff(ParamSelector(values, i), lambda: mask_loss(MaskSample.relaxed(values))[0])
            assert numeric.value == pytest.approx(grad[i], rel=1e-6)

    def test_empty_sample(self):
        with pytest.raises(InvalidArgumentError):
            mask_loss(MaskSample.from_hard(np.zeros(0)))


class TestPruning:
    def test_saturated_present_keeps_all(self):
        np.testing.assert_array_equal(prune_never_sampled(repeated([30.0, -30.0], 100), 10, seed=0),
                                      np.arange(100))

    def test_saturated_absent_removes_all(self):
        assert prune_never_sampled(repeated([-30.0, 30.0], 100), 10, seed=0).size == 0

    @pytest.mark.parametrize("p", [0.01, 0.1, 0.5])
    def test_removal_fraction_matches_closed_form(self, p):
        n = 40000
        keep = prune_never_sampled(logits_for(p, n), repeats=10, seed=21)
        removed = 1.0 - keep.size / n
        assert abs(removed - (1.0 - p) ** 10) < 0.01

    def test_same_seed_same_prune_set(self):
        logits = logits_for(0.2, 500)
        np.testing.assert_array_equal(prune_never_sampled(logits, 10, seed=4), prune_never_sampled(logits, 10, seed=4))

    def test_repeats_must_be_positive(self):
        with pytest.raises(ValueError):
            prune_never_sampled(repeated([0.0, 0.0], 2), repeats=0)

    def test_threshold_rule(self):
        logits = np.vstack([logits_for(0.7, 1), logits_for(0.5, 1), logits_for(0.3, 1)])
        np.testing.assert_array_equal(prune_below_threshold(logits, 0.5), [0, 1])


class TestSamplerStats:
    def test_acceptance_gaps(self):
        logits = np.array([[0.0, 0.0], [np.log(3.0), 0.0], [3.0, 0.0]])
        report = sampler_stats(logits, temperature=0.5, draws=100000, seed=0)
        assert report.passed
        assert all(abs(entry.z_score) < 4.0 for entry in report.entries)
        assert 0.494 <= report.entries[0].frequency <= 0.506

    def test_saturated_frequencies_are_exact(self):
        report = sampler_stats(np.array([[60.0, 0.0], [0.0, 60.0]]), draws=2000, seed=1)
        assert report.entries[0].frequency == 1.0
        assert report.entries[1].frequency == 0.0
        assert report.passed

    def test_deterministic(self):
        logits = np.array([[0.5, 0.0], [-1.0, 0.0]])
        first = sampler_stats(logits, draws=5000, seed=8)
        second = sampler_stats(logits, draws=5000, seed=8)
        assert first.model_dump() == second.model_dump()

    def test_too_few_draws(self):
        with pytest.raises(ValueError):
            sampler_stats(np.zeros((1, 2)), draws=10)
