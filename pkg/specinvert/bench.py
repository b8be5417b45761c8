"""
bench.py — delay / latency / real-time-factor harness.

Each vocoder is wrapped in a small handle exposing push/flush/reset plus its
delay bookkeeping. `run_bench` times every push after a warm-up with
time.perf_counter and derives:
  - lookahead / total algorithmic delay (pure functions of the configuration)
  - mean / median / p95 per-hop latency
  - real-time factor = audio seconds produced / wall-clock seconds
  - state memory, computed from buffer sizes (not sampled from the OS)

Non-streaming vocoders are timed as one whole-clip call with per-hop latency
NaN; nGL reports the clip duration as its delay, nMelGAN its future context.

Report files: <prefix>.txt (key=value lines), <prefix>.json, <prefix>_latency.csv
"""

import math
import os
import time
from dataclasses import asdict, dataclass, field
from typing import List

import numpy as np
import pandas as pd

from .config import NGL_ITERS, GlConfig, StreamConfig
from .errors import SignalError
from .griffin_lim import GlStreamState, gl_nonstreaming
from .melgan import (GeneratorStreamState, WeightSet, build_generator, check_config,
                     generator_forward_batch)
from .specpipe import LogMagSpectrogram
from .utils import ensure_dir, log, write_json


# -----------------------------
# Vocoder handles
# -----------------------------
class SglVocoder:
    streaming = True

    def __init__(self, gl_cfg: GlConfig):
        self.name = f"sGL{gl_cfg.lookahead_frames}"
        self.state = GlStreamState(gl_cfg)
        self.cfg = gl_cfg.base
        self.lookahead_samples = gl_cfg.lookahead_samples
        self.total_delay_samples = gl_cfg.total_delay_samples
        self.output_offset_samples = gl_cfg.lookahead_samples
        self.file_size_bytes = 0

    def push(self, frame):
        return self.state.push(frame)

    def flush(self):
        return self.state.flush()

    def reset(self):
        self.state.reset()

    def state_bytes(self) -> int:
        return self.state.nbytes()


class MelganVocoder:
    streaming = True
    lookahead_samples = 0
    total_delay_samples = 0
    output_offset_samples = 0

    def __init__(self, weights: WeightSet, cfg: StreamConfig, graph=None, weights_path: str = None):
        graph = graph or build_generator()
        check_config(graph, cfg)
        self.name = "sMelGAN0"
        self.cfg = cfg
        self.state = GeneratorStreamState(weights, graph)
        self.file_size_bytes = os.path.getsize(weights_path) if weights_path else self.state.weights.nbytes()

    def push(self, frame):
        return self.state.push(frame)

    def flush(self):
        return self.state.flush()

    def reset(self):
        self.state.reset()

    def state_bytes(self) -> int:
        return self.state.nbytes()


class NullVocoder:
    """Copy-through: emits the first frame_step values of each frame."""
    streaming = True
    name = "null"
    lookahead_samples = 0
    total_delay_samples = 0
    output_offset_samples = 0
    file_size_bytes = 0

    def __init__(self, cfg: StreamConfig):
        self.cfg = cfg

    def push(self, frame):
        return np.array(frame[:self.cfg.frame_step], dtype=np.float64)

    def flush(self):
        return np.zeros(0)

    def reset(self):
        pass

    def state_bytes(self) -> int:
        return 0


class NglVocoder:
    streaming = False
    output_offset_samples = 0
    file_size_bytes = 0

    def __init__(self, cfg: StreamConfig, n_iters: int = NGL_ITERS):
        self.name = "nGL"
        self.cfg = cfg
        self.n_iters = n_iters

    def run(self, spec: LogMagSpectrogram):
        return gl_nonstreaming(spec, self.n_iters, cfg=self.cfg)

    def delay_samples_for(self, spec: LogMagSpectrogram) -> int:
        return spec.num_frames * self.cfg.frame_step

    def state_bytes_for(self, spec: LogMagSpectrogram) -> int:
        n, bins = spec.frames.shape
        samples = (n - 1) * self.cfg.frame_step + self.cfg.frame_size
        return n * bins * (8 + 16 + 16) + samples * 8 * 2


class NMelganVocoder:
    """Non-causal generator run over the whole clip; delay is its future context."""
    streaming = False
    output_offset_samples = 0

    def __init__(self, weights: WeightSet, cfg: StreamConfig, graph=None, weights_path: str = None):
        self.graph = graph or build_generator(causal=False)
        check_config(self.graph, cfg)
        self.name = "nMelGAN"
        self.cfg = cfg
        self.weights = WeightSet(weights).check(self.graph)
        self.file_size_bytes = os.path.getsize(weights_path) if weights_path else self.weights.nbytes()

    def run(self, spec: LogMagSpectrogram):
        return generator_forward_batch(spec, self.weights, self.graph)

    def delay_samples_for(self, spec: LogMagSpectrogram) -> int:
        return self.graph.lookahead_samples

    def state_bytes_for(self, spec: LogMagSpectrogram) -> int:
        # two live activations of the widest layer (steps per frame x channels)
        rate, widest = 1, 0
        for l in self.graph.layers:
            rate *= l.stride
            widest = max(widest, rate * l.ch_out)
        return self.weights.nbytes() + 2 * spec.num_frames * widest * 4


# -----------------------------
# Report
# -----------------------------
@dataclass
class BenchReport:
    vocoder: str
    lookahead_delay_ms: float
    total_delay_ms: float
    latency_mean_ms: float
    latency_median_ms: float
    latency_p95_ms: float
    rtf: float
    state_bytes: int
    file_size_bytes: int
    hops: int
    audio_seconds: float
    wall_seconds: float
    latencies_ms: List[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("latencies_ms")
        for k, v in d.items():
            if isinstance(v, float) and math.isnan(v):
                d[k] = None
        return d

    def to_kv(self) -> str:
        lines = []
        for k, v in self.to_dict().items():
            if v is None:
                v = "nan"
            elif isinstance(v, float):
                v = f"{v:.6g}"
            lines.append(f"{k}={v}")
        return "\n".join(lines) + "\n"

    def save(self, prefix: str):
        parent = os.path.dirname(prefix)
        if parent:
            ensure_dir(parent)
        with open(prefix + ".txt", "w", encoding="utf-8") as f:
            f.write(self.to_kv())
        write_json(self.to_dict(), prefix + ".json")
        pd.DataFrame({"hop": np.arange(len(self.latencies_ms)),
                      "latency_ms": self.latencies_ms}).to_csv(prefix + "_latency.csv", index=False)
        return [prefix + ".txt", prefix + ".json", prefix + "_latency.csv"]


def _ms(samples: int, sample_rate: int) -> float:
    return 1000.0 * samples / sample_rate


def run_bench(vocoder, spec: LogMagSpectrogram, warmup_hops: int = 10) -> BenchReport:
    cfg = vocoder.cfg
    n = spec.num_frames
    if n == 0:
        raise SignalError("cannot benchmark an empty spectrogram")

    if not vocoder.streaming:
        t0 = time.perf_counter()
        vocoder.run(spec)
        wall = time.perf_counter() - t0
        audio_s = n * cfg.frame_step / cfg.sample_rate
        delay_ms = _ms(vocoder.delay_samples_for(spec), cfg.sample_rate)
        return BenchReport(vocoder.name, delay_ms, delay_ms, float("nan"), float("nan"), float("nan"),
                           audio_s / wall if wall > 0 else float("inf"),
                           vocoder.state_bytes_for(spec), vocoder.file_size_bytes, n, audio_s, wall)

    warmup = max(0, min(int(warmup_hops), n - 1))
    vocoder.reset()
    for frame in spec.frames[:warmup]:
        vocoder.push(frame)
    latencies = []
    clock = time.perf_counter
    start = clock()
    for frame in spec.frames[warmup:]:
        t0 = clock()
        vocoder.push(frame)
        latencies.append(clock() - t0)
    wall = clock() - start
    vocoder.flush()

    hops = len(latencies)
    audio_s = hops * cfg.frame_step / cfg.sample_rate
    lat = pd.Series(latencies) * 1000.0
    report = BenchReport(
        vocoder=vocoder.name,
        lookahead_delay_ms=_ms(vocoder.lookahead_samples, cfg.sample_rate),
        total_delay_ms=_ms(vocoder.total_delay_samples, cfg.sample_rate),
        latency_mean_ms=float(lat.mean()),
        latency_median_ms=float(lat.median()),
        latency_p95_ms=float(lat.quantile(0.95)),
        rtf=audio_s / wall if wall > 0 else float("inf"),
        state_bytes=int(vocoder.state_bytes()),
        file_size_bytes=int(vocoder.file_size_bytes),
        hops=hops,
        audio_seconds=audio_s,
        wall_seconds=wall,
        latencies_ms=lat.tolist(),
    )
    log.info("%s: %d hops, mean latency %.3f ms, RTF %.2f", report.vocoder, hops,
             report.latency_mean_ms, report.rtf)
    return report
