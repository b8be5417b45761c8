import pytest

from specinvert.config import W_SIZE, GlConfig, StreamConfig


class TestEnvKnobs:
    def test_integer_knob(self, monkeypatch):
        monkeypatch.setenv("SPECINVERT_W_SIZE", "6")
        assert GlConfig.from_env().w_size == 6

    def test_fractional_integer_knob_falls_back(self, monkeypatch):
        monkeypatch.setenv("SPECINVERT_W_SIZE", "6.7")
        gl = GlConfig.from_env()
        assert gl.w_size == W_SIZE
        assert isinstance(gl.w_size, int)

    def test_garbage_falls_back(self, monkeypatch):
        monkeypatch.setenv("SPECINVERT_FRAME_STEP", "abc")
        assert StreamConfig.from_env().frame_step == 200

    def test_float_knob(self, monkeypatch):
        monkeypatch.setenv("SPECINVERT_PREEMPH", "0.5")
        assert StreamConfig.from_env().preemph_coef == pytest.approx(0.5)

    def test_overrides_win(self, monkeypatch):
        monkeypatch.setenv("SPECINVERT_IND", "1")
        assert GlConfig.from_env(ind=3).ind == 3
