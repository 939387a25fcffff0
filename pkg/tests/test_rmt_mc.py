import math

import numpy as np
import pytest

from painleve_gap.exceptions import BadParameter
from painleve_gap.rmt_mc import (
    edge_cdf_vs_tw,
    edge_scaling,
    empirical_cdf,
    ks_distance,
    sample_dense_gue,
    sample_gue_spectrum,
    sample_lambda_max,
    thin_spectrum,
    tridiagonal_vs_dense,
)


class TestSpectra:
    """Sampled GUE spectra."""

    def test_deterministic(self):
        first = sample_gue_spectrum(50, 7)
        second = sample_gue_spectrum(50, 7)
        np.testing.assert_array_equal(first.eigenvalues, second.eigenvalues)

    def test_sorted_and_scaled(self):
        sample = sample_gue_spectrum(400, 11)
        assert len(sample) == 400
        assert np.all(np.diff(sample.eigenvalues) >= 0)
        assert sample.largest == pytest.approx(1.0, abs=0.1)
        assert sample.eigenvalues[0] == pytest.approx(-1.0, abs=0.1)

    def test_dense_sampler(self):
        sample = sample_dense_gue(200, 5)
        assert len(sample) == 200
        assert sample.largest == pytest.approx(1.0, abs=0.15)

    def test_too_small(self):
        with pytest.raises(BadParameter):
            sample_gue_spectrum(1, 0)

    def test_samplers_agree(self):
        assert tridiagonal_vs_dense(10, 400, 1) < 0.2


class TestThinning:
    """Independent removal of eigenvalues."""

    def test_keep_all(self):
        sample = sample_gue_spectrum(30, 2)
        thinned = thin_spectrum(sample, 1.0, 3)
        np.testing.assert_array_equal(thinned.eigenvalues, sample.eigenvalues)

    def test_keep_none(self):
        thinned = thin_spectrum(sample_gue_spectrum(30, 2), 0.0, 3)
        assert len(thinned) == 0
        assert thinned.largest == -math.inf

    def test_keeps_a_fraction(self):
        thinned = thin_spectrum(sample_gue_spectrum(2000, 2), 0.25, 3)
        assert len(thinned) == pytest.approx(500, abs=100)

    @pytest.mark.parametrize("keep_prob", [-0.1, 1.5])
    def test_bad_probability(self, keep_prob):
        with pytest.raises(BadParameter):
            thin_spectrum(sample_gue_spectrum(30, 2), keep_prob, 3)


class TestLargestEigenvalue:
    """Largest eigenvalues and edge statistics."""

    def test_independent_of_threads(self):
        single = sample_lambda_max(20, 600, seed=3, threads=1)
        several = sample_lambda_max(20, 600, seed=3, threads=4)
        assert single.shape == (600,)
        np.testing.assert_array_equal(single, several)

    def test_no_samples(self):
        with pytest.raises(BadParameter):
            sample_lambda_max(20, 0, seed=3)

    def test_edge_scaling(self):
        assert edge_scaling(1.0, 8) == 0.0
        assert edge_scaling(1.5, 8) == pytest.approx(4.0)

    def test_empirical_cdf(self):
        np.testing.assert_allclose(
            empirical_cdf([3.0, 1.0, 2.0], [0.0, 2.0, 5.0]), [0.0, 2.0 / 3.0, 1.0]
        )

    def test_ks_distance_of_tracy_widom_samples(self):
        scaled = edge_scaling(sample_lambda_max(200, 2000, seed=17), 200)
        assert ks_distance(scaled) < 0.06

    @pytest.mark.parametrize("n, n_samples", [(50, 2000), (200, 500)])
    def test_edge_budget(self, n, n_samples):
        with pytest.raises(BadParameter):
            edge_cdf_vs_tw(n, n_samples, 1, [0.0])
