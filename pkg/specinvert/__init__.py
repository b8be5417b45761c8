"""specinvert — real-time magnitude spectrogram inversion (streaming Griffin-Lim, streaming MelGAN)."""

from .config import GlConfig, StreamConfig
from .dsp_core import (Deemphasis, StreamingIstftState, batch_istft, batch_stft,
                       deemphasis, hann_window, preemphasis, streaming_istft_flush,
                       streaming_istft_push)
from .griffin_lim import (GlStreamState, gl_nonstreaming, gl_stream, gl_stream_flush,
                          gl_stream_push, gl_window_iterations)
from .melgan import (GeneratorArch, GeneratorGraph, GeneratorStreamState, WeightSet,
                     build_generator, generator_forward_batch, generator_stream_push,
                     load_weights, random_weights, save_weights)
from .metrics import snr, spectral_convergence
from .specpipe import (LogMagSpectrogram, analyze, load_spectrogram, log_compress,
                       log_expand, save_spectrogram)
from .wav_io import WavClip, wav_read, wav_write

__version__ = "0.1.0"
