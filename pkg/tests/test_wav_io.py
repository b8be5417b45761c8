import numpy as np
import pytest
from scipy.io import wavfile

from specinvert.errors import ChannelCountError, NotPcm16Error, SampleRateError, WavFormatError
from specinvert.wav_io import PCM_MAX, WavClip, quantize, wav_read, wav_write


class TestQuantize:
    def test_round_half_away_from_zero(self):
        q = quantize([0.5 / 32768, -0.5 / 32768, 1.49 / 32768, -1.5 / 32768])
        np.testing.assert_array_equal(q, [1, -1, 1, -2])

    def test_clamped(self):
        np.testing.assert_array_equal(quantize([2.0, -2.0, PCM_MAX]), [32767, -32768, 32767])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            quantize([np.nan])


class TestWavFiles:
    def test_round_trip_is_exact(self, rng, tmp_path):
        samples = rng.integers(-32768, 32768, 4000) / 32768.0
        path = str(tmp_path / "a.wav")
        wav_write(path, WavClip(samples, 16000))
        clip = wav_read(path)
        assert clip.sample_rate == 16000
        np.testing.assert_array_equal(clip.samples, samples)

    def test_empty_clip(self, tmp_path):
        path = tmp_path / "z.wav"
        wav_write(str(path), WavClip(np.zeros(0), 16000))
        assert path.stat().st_size == 44
        assert len(wav_read(str(path))) == 0

    def test_creates_parent_dirs(self, tmp_path):
        path = tmp_path / "deep" / "dir" / "x.wav"
        wav_write(str(path), WavClip(np.zeros(10)))
        assert path.exists()

    def test_wrong_rate(self, tmp_path):
        path = str(tmp_path / "r.wav")
        wavfile.write(path, 44100, np.zeros(100, dtype=np.int16))
        with pytest.raises(SampleRateError, match="44100"):
            wav_read(path)

    def test_stereo(self, tmp_path):
        path = str(tmp_path / "s.wav")
        wavfile.write(path, 16000, np.zeros((100, 2), dtype=np.int16))
        with pytest.raises(ChannelCountError):
            wav_read(path)

    def test_float_samples(self, tmp_path):
        path = str(tmp_path / "f.wav")
        wavfile.write(path, 16000, np.zeros(100, dtype=np.float32))
        with pytest.raises(NotPcm16Error):
            wav_read(path)

    def test_not_a_wav(self, tmp_path):
        path = tmp_path / "n.wav"
        path.write_bytes(b"hello world, not a riff file")
        with pytest.raises(WavFormatError):
            wav_read(str(path))
