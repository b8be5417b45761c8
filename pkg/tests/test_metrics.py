import numpy as np
import pytest

from specinvert.errors import SignalError
from specinvert.metrics import (SC_FLOOR_DB, SNR_CEIL_DB, align, reanalysis_convergence,
                                reanalysis_magnitude, snr, spectral_convergence)
from specinvert.specpipe import analyze


class TestSpectralConvergence:
    def test_identical_hits_floor(self, rng):
        m = rng.random((4, 10))
        assert spectral_convergence(m, m) == SC_FLOOR_DB

    def test_zero_estimate_is_0_db(self, rng):
        m = rng.random((4, 10))
        assert spectral_convergence(m, np.zeros_like(m)) == pytest.approx(0.0, abs=1e-12)

    def test_doubled_estimate_is_0_db(self, rng):
        m = rng.random((4, 10))
        assert spectral_convergence(m, 2 * m) == pytest.approx(0.0, abs=1e-12)

    def test_half_error(self):
        assert spectral_convergence(np.ones(4), np.full(4, 0.5)) == pytest.approx(20 * np.log10(0.5))

    def test_shape_mismatch(self):
        with pytest.raises(SignalError):
            spectral_convergence(np.ones((2, 3)), np.ones((3, 2)))

    def test_zero_reference(self):
        with pytest.raises(SignalError):
            spectral_convergence(np.zeros(3), np.ones(3))


class TestSnr:
    def test_identical_hits_ceiling(self, rng):
        x = rng.standard_normal(100)
        assert snr(x, x) == SNR_CEIL_DB

    def test_zero_estimate_is_0_db(self, rng):
        x = rng.standard_normal(100)
        assert snr(x, np.zeros_like(x)) == pytest.approx(0.0, abs=1e-12)

    def test_known_noise_level(self):
        for seed in range(10):
            rng = np.random.default_rng(seed)
            x = rng.standard_normal(16000)
            noisy = x + rng.standard_normal(16000) * np.std(x) / 10.0
            assert abs(snr(x, noisy) - 20.0) < 0.5

    def test_length_mismatch(self):
        with pytest.raises(SignalError):
            snr(np.ones(3), np.ones(4))

    def test_zero_reference(self):
        with pytest.raises(SignalError):
            snr(np.zeros(3), np.ones(3))


class TestAlignment:
    def test_offset_and_truncation(self):
        ref, est = align(np.arange(10), np.arange(20), offset=3)
        np.testing.assert_array_equal(ref, np.arange(10))
        np.testing.assert_array_equal(est, np.arange(3, 13))

    def test_offset_past_end(self):
        ref, est = align(np.arange(5), np.arange(5), offset=9)
        assert ref.size == 0 and est.size == 0

    def test_reanalysis_of_the_source_is_exact(self, cfg, helpers):
        x = helpers.multisine(0.5)
        spec = analyze(x, cfg)
        # gain 1: the source itself, not vocoder output
        sc = reanalysis_convergence(spec, x, cfg=cfg, gain=1.0)
        assert sc < -60.0

    def test_reanalysis_magnitude_shape(self, cfg, rng):
        assert reanalysis_magnitude(rng.standard_normal(1200), cfg).shape == (3, 1025)

    def test_output_too_short(self, cfg, helpers):
        spec = analyze(helpers.multisine(0.1), cfg)
        with pytest.raises(SignalError):
            reanalysis_convergence(spec, np.zeros(500))
