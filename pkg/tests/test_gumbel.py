import math

import numpy as np
import pytest
from scipy import stats

from propall import gumbel
from propall.enums import NoiseConstruction
from propall.exceptions import ValidationError
from propall.gumbel import NoiseSchedule, RandomSource


class TestSchedule:
    @pytest.mark.parametrize("step, expected", [(0, 1.0), (80, 1.0), (90, 0.5), (100, 0.0)])
    def test_plateau_then_linear(self, step, expected):
        assert gumbel.lambda_at(NoiseSchedule(100), step) == pytest.approx(expected, abs=1e-15)

    def test_peak_scales(self):
        assert gumbel.lambda_at(NoiseSchedule(100, peak_lambda=2.0), 90) == pytest.approx(1.0)

    def test_non_increasing(self):
        sched = NoiseSchedule(137, plateau_fraction=0.6)
        values = [gumbel.lambda_at(sched, t) for t in range(138)]
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert all(v == 1.0 for v in values[: math.floor(0.6 * 137) + 1])

    def test_full_plateau(self):
        sched = NoiseSchedule(10, plateau_fraction=1.0)
        assert gumbel.lambda_at(sched, 10) == 1.0

    def test_step_out_of_range(self):
        with pytest.raises(ValidationError):
            gumbel.lambda_at(NoiseSchedule(10), 11)
        with pytest.raises(ValidationError):
            gumbel.lambda_at(NoiseSchedule(10), -1)

    @pytest.mark.parametrize(
        "kwargs",
        [{"total_steps": 0}, {"total_steps": 5, "plateau_fraction": 1.5}, {"total_steps": 5, "peak_lambda": -1.0}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            NoiseSchedule(**kwargs)


class TestRandomSource:
    def test_same_seed_same_stream(self):
        ra, rb = RandomSource(7), RandomSource(7)
        assert [gumbel.gumbel_difference_sample(ra) for _ in range(100)] == [
            gumbel.gumbel_difference_sample(rb) for _ in range(100)
        ]

    def test_spawned_streams_differ(self):
        first, second = RandomSource(1).spawn(2)
        assert first.generator.random() != second.generator.random()

    def test_spawn_is_reproducible(self):
        a = [s.generator.integers(1 << 30) for s in RandomSource(3).spawn(3)]
        b = [s.generator.integers(1 << 30) for s in RandomSource(3).spawn(3)]
        assert a == b

    def test_repr(self):
        assert repr(RandomSource(5)) == "RandomSource(seed=5, algorithm='PCG64')"

    @pytest.mark.parametrize("seed", [-1, 2**64])
    def test_seed_out_of_range(self, seed):
        with pytest.raises(ValidationError):
            RandomSource(seed)


class TestGumbelDifference:
    def test_moments(self):
        x = gumbel.gumbel_difference(RandomSource(0), 100_000)
        assert -0.02 < x.mean() < 0.02
        assert abs(x.var() - math.pi**2 / 3) < 0.1

    @pytest.mark.parametrize("construction", list(NoiseConstruction))
    def test_logistic_distribution(self, construction):
        x = gumbel.gumbel_difference(RandomSource(11), 100_000, construction)
        assert stats.kstest(x, "logistic").statistic < 0.01

    def test_scalar_sample(self):
        assert isinstance(gumbel.gumbel_difference_sample(RandomSource(0)), float)


class TestPerturb:
    def test_zero_lambda_is_identity(self):
        r = np.array([0.5, -3.0, 12.0])
        rng = RandomSource(0)
        out = gumbel.perturb_logits(r, 0.0, rng)
        np.testing.assert_array_equal(out, r)
        assert out is not r
        # no draw was consumed
        assert rng.generator.random() == RandomSource(0).generator.random()

    def test_reproducible(self):
        r = np.zeros((4, 3))
        a = gumbel.perturb_logits(r, 1.0, RandomSource(9))
        b = gumbel.perturb_logits(r, 1.0, RandomSource(9))
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, r)

    def test_input_untouched(self):
        r = np.ones(5)
        gumbel.perturb_logits(r, 1.0, RandomSource(0))
        np.testing.assert_array_equal(r, np.ones(5))

    def test_noise_scales_with_lambda(self):
        r = np.zeros(10_000)
        diff = gumbel.perturb_logits(r, 2.0, RandomSource(4)) - r
        assert diff.std() == pytest.approx(2.0 * math.pi / math.sqrt(3.0), rel=0.05)

    def test_negative_lambda(self):
        with pytest.raises(ValidationError):
            gumbel.perturb_logits(np.zeros(2), -0.1, RandomSource(0))
