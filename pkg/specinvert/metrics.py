"""
metrics.py — objective quality proxies: spectral convergence and SNR.

Both return dB. Exact matches are clamped (SC floor -300 dB, SNR ceiling
+300 dB) so results stay finite in JSON/CSV reports.
"""

import numpy as np

from .config import StreamConfig
from .dsp_core import batch_stft, preemphasis
from .errors import SignalError
from .specpipe import LogMagSpectrogram, log_expand

SC_FLOOR_DB = -300.0
SNR_CEIL_DB = 300.0


def spectral_convergence(ref_mag, est_mag) -> float:
    """20*log10(||ref - est||_F / ||ref||_F)."""
    ref = np.asarray(ref_mag, dtype=np.float64)
    est = np.asarray(est_mag, dtype=np.float64)
    if ref.shape != est.shape:
        raise SignalError(f"shape mismatch: ref {ref.shape} vs est {est.shape}")
    den = np.linalg.norm(ref)
    if den == 0:
        raise SignalError("reference magnitude is all zero")
    num = np.linalg.norm(ref - est)
    if num == 0:
        return SC_FLOOR_DB
    return float(max(20.0 * np.log10(num / den), SC_FLOOR_DB))


def snr(ref, est) -> float:
    """10*log10(sum(ref^2) / sum((ref - est)^2))."""
    ref = np.asarray(ref, dtype=np.float64)
    est = np.asarray(est, dtype=np.float64)
    if ref.shape != est.shape:
        raise SignalError(f"length mismatch: ref {ref.shape} vs est {est.shape}")
    p_ref = float(np.sum(ref ** 2))
    if p_ref == 0:
        raise SignalError("reference signal is all zero")
    p_err = float(np.sum((ref - est) ** 2))
    if p_err == 0:
        return SNR_CEIL_DB
    return float(min(10.0 * np.log10(p_ref / p_err), SNR_CEIL_DB))


def align(ref, est, offset: int = 0):
    """Drop the first `offset` samples of est, truncate both to a common length."""
    ref = np.asarray(ref, dtype=np.float64)
    est = np.asarray(est, dtype=np.float64)[max(int(offset), 0):]
    n = min(len(ref), len(est))
    return ref[:n], est[:n]


def reanalysis_magnitude(audio, cfg: StreamConfig, gain: float = 1.0) -> np.ndarray:
    """|STFT(preemphasis(gain * audio))|, the linear magnitude the analysis front end sees."""
    return np.abs(batch_stft(preemphasis(np.asarray(audio) * gain, cfg.preemph_coef), cfg))


def reanalysis_convergence(target: LogMagSpectrogram, audio, offset: int = 0,
                           cfg: StreamConfig = None, gain: float = None) -> float:
    """SC between a target spectrogram and the re-analysis of vocoder output.

    Output is shifted by `offset` samples and scaled by `gain` (default 1 + coef,
    undoing the synthesis normalization) before analysis; the comparison covers
    the frames both sides have.
    """
    cfg = cfg or target.config()
    gain = (1.0 + cfg.preemph_coef) if gain is None else gain
    est = np.asarray(audio, dtype=np.float64)[max(int(offset), 0):]
    if len(est) < cfg.frame_size:
        raise SignalError(f"vocoder output too short to analyze ({len(est)} samples)")
    est_mag = reanalysis_magnitude(est, cfg, gain)
    ref_mag = log_expand(np.asarray(target.frames, dtype=np.float64), cfg.log_delta)
    n = min(len(ref_mag), len(est_mag))
    return spectral_convergence(ref_mag[:n], est_mag[:n])
