import json
import math

import numpy as np
import pandas as pd
import pytest

from specinvert.bench import (BenchReport, MelganVocoder, NglVocoder, NMelganVocoder, NullVocoder,
                              SglVocoder, run_bench)
from specinvert.config import GlConfig, StreamConfig
from specinvert.errors import ConfigError, SignalError
from specinvert.melgan import build_generator, random_weights
from specinvert.specpipe import LogMagSpectrogram, analyze


@pytest.fixture
def spec(cfg, helpers):
    return analyze(helpers.speech_like(1.0), cfg)


class TestDelays:
    def test_sgl_default(self, gl_cfg, spec):
        r = run_bench(SglVocoder(gl_cfg), spec)
        assert r.vocoder == "sGL1"
        assert r.lookahead_delay_ms == pytest.approx(12.5)
        assert r.total_delay_ms == pytest.approx(50.0)

    def test_sgl_without_look_ahead(self, cfg, spec):
        r = run_bench(SglVocoder(GlConfig(ind=3, base=cfg)), spec)
        assert r.vocoder == "sGL0"
        assert r.lookahead_delay_ms == 0.0
        assert r.total_delay_ms == pytest.approx(37.5)

    def test_delays_do_not_depend_on_speed(self, gl_cfg, spec):
        a, b = run_bench(SglVocoder(gl_cfg), spec), run_bench(SglVocoder(gl_cfg), spec, warmup_hops=0)
        assert (a.lookahead_delay_ms, a.total_delay_ms) == (b.lookahead_delay_ms, b.total_delay_ms)

    def test_melgan_has_no_delay(self, cfg):
        graph = build_generator()
        voc = MelganVocoder(random_weights(graph, 0), cfg, graph)
        spec = LogMagSpectrogram.from_frames(np.random.default_rng(0).normal(-2, 1, (12, 1025)), cfg)
        r = run_bench(voc, spec, warmup_hops=2)
        assert (r.vocoder, r.lookahead_delay_ms, r.total_delay_ms) == ("sMelGAN0", 0.0, 0.0)
        assert r.hops == 10
        assert r.file_size_bytes == 4 * graph.param_count

    def test_ngl_delay_is_clip_duration(self, cfg, spec):
        r = run_bench(NglVocoder(cfg, 3), spec)
        assert r.total_delay_ms == pytest.approx(1000.0 * spec.duration_seconds())
        assert math.isnan(r.latency_mean_ms)
        assert r.state_bytes > 0


class TestTiming:
    def test_null_vocoder_is_fast(self, cfg, spec):
        r = run_bench(NullVocoder(cfg), spec)
        assert r.rtf > 1.0
        assert r.hops == spec.num_frames - 10

    def test_latencies_fit_in_wall_clock(self, gl_cfg, spec):
        r = run_bench(SglVocoder(gl_cfg), spec)
        assert len(r.latencies_ms) == r.hops
        assert sum(r.latencies_ms) <= 1000.0 * r.wall_seconds + 1e-6
        assert r.latency_median_ms <= r.latency_p95_ms

    def test_empty_spectrogram(self, cfg):
        with pytest.raises(SignalError):
            run_bench(NullVocoder(cfg), LogMagSpectrogram.from_frames(np.zeros((0, 1025)), cfg))

    @pytest.mark.slow
    def test_sgl_runs_faster_than_real_time(self, gl_cfg, helpers, cfg):
        spec = analyze(helpers.speech_like(10.0), cfg)
        assert run_bench(SglVocoder(gl_cfg), spec).rtf > 1.0


class TestReportFiles:
    def test_save(self, gl_cfg, spec, tmp_path):
        r = run_bench(SglVocoder(gl_cfg), spec)
        paths = r.save(str(tmp_path / "reports" / "sgl"))
        assert len(paths) == 3
        kv = dict(line.split("=", 1) for line in open(paths[0]).read().splitlines())
        assert kv["vocoder"] == "sGL1"
        assert float(kv["total_delay_ms"]) == pytest.approx(50.0)
        data = json.load(open(paths[1]))
        assert data["lookahead_delay_ms"] == pytest.approx(12.5)
        assert "latencies_ms" not in data
        lat = pd.read_csv(paths[2])
        assert list(lat.columns) == ["hop", "latency_ms"]
        assert len(lat) == r.hops

    def test_nan_written_as_null(self):
        r = BenchReport("nGL", 1.0, 1.0, float("nan"), float("nan"), float("nan"), 5.0, 0, 0, 1, 0.1, 0.02)
        assert r.to_dict()["latency_mean_ms"] is None
        assert "latency_mean_ms=nan" in r.to_kv()


class TestNonStreamingMelgan:
    def test_delay_is_future_context(self, cfg):
        graph = build_generator(causal=False)
        voc = NMelganVocoder(random_weights(graph, 0), cfg, graph)
        spec = LogMagSpectrogram.from_frames(np.random.default_rng(1).normal(-2, 1, (8, 1025)), cfg)
        r = run_bench(voc, spec)
        assert r.vocoder == "nMelGAN"
        assert r.lookahead_delay_ms == pytest.approx(1000.0 * 1367 / 16000)
        assert r.total_delay_ms == r.lookahead_delay_ms
        assert math.isnan(r.latency_p95_ms)
        assert r.file_size_bytes == 4 * graph.param_count
        assert r.state_bytes > r.file_size_bytes

    def test_rejects_mismatched_config(self):
        with pytest.raises(ConfigError):
            NMelganVocoder({}, StreamConfig(fft_size=1024))
