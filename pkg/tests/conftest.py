import numpy as np
import pytest

from specinvert.config import GlConfig, StreamConfig


@pytest.fixture
def cfg():
    return StreamConfig()


@pytest.fixture
def small_cfg():
    """Tiny transform for brute-force DFT checks."""
    return StreamConfig(fft_size=64, frame_size=32, frame_step=8)


@pytest.fixture
def gl_cfg(cfg):
    return GlConfig(base=cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def brute_dft(frame, n_fft):
    """Half-spectrum DFT of a zero-padded real frame, O(N^2)."""
    x = np.zeros(n_fft)
    x[:len(frame)] = frame
    n = np.arange(n_fft)
    k = np.arange(n_fft // 2 + 1)[:, None]
    return (x * np.exp(-2j * np.pi * k * n / n_fft)).sum(axis=1)


def multisine(seconds=1.0, sr=16000, freqs=(220.0, 440.0, 1250.0, 3100.0), seed=0):
    rng = np.random.default_rng(seed)
    t = np.arange(int(seconds * sr)) / sr
    x = sum(rng.uniform(0.05, 0.2) * np.sin(2 * np.pi * f * t + rng.uniform(0, 2 * np.pi)) for f in freqs)
    return x


def speech_like(seconds=2.0, sr=16000, seed=0):
    """Gliding harmonic tone with a syllable-rate envelope."""
    rng = np.random.default_rng(seed)
    t = np.arange(int(seconds * sr)) / sr
    f0 = rng.uniform(100, 180) + 60 * np.sin(2 * np.pi * rng.uniform(0.3, 0.8) * t)
    phase = 2 * np.pi * np.cumsum(f0) / sr
    x = sum((0.3 / h) * np.sin(h * phase) for h in range(1, 9))
    env = 0.5 * (1 - np.cos(2 * np.pi * rng.uniform(3, 5) * t))
    return 0.5 * x * env + 1e-3 * rng.standard_normal(len(t))


@pytest.fixture
def helpers():
    class H:
        pass
    h = H()
    h.brute_dft = brute_dft
    h.multisine = multisine
    h.speech_like = speech_like
    return h
