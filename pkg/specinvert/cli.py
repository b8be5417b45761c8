"""
cli.py — `specinvert analyze | invert | bench | compare | init-weights`.

Use:
  python -m specinvert analyze in.wav out.lms
  python -m specinvert invert out.lms sgl.wav --vocoder sgl             # sGL1 defaults
  python -m specinvert invert out.lms ngl.wav --vocoder ngl --iters 70  # nGL
  python -m specinvert invert out.lms mg.wav --vocoder melgan --weights seeded.gwt
  python -m specinvert invert out.lms nmg.wav --vocoder nmelgan --weights seeded.gwt  # non-causal
  python -m specinvert bench out.lms --vocoder sgl --report reports/sgl
  python -m specinvert compare in.wav sgl.wav --offset 200
  python -m specinvert init-weights seeded.gwt --seed 0

Exit codes: 0 ok, 1 runtime/format error (one-line diagnostic on stderr),
2 bad usage (argparse).

Env knobs: see config.py (SPECINVERT_*). SPECINVERT_SEED lets `--vocoder melgan|nmelgan`
run without --weights on seeded random weights.
"""

import argparse
import sys

import numpy as np

from . import config as C
from .bench import (MelganVocoder, NglVocoder, NMelganVocoder, NullVocoder, SglVocoder,
                    run_bench)
from .config import GlConfig, StreamConfig
from .errors import ConfigError, SpecInvertError
from .griffin_lim import gl_nonstreaming, gl_stream
from .melgan import (build_generator, check_config, generator_forward_batch,
                     load_weights, random_weights, save_weights)
from .metrics import align, reanalysis_magnitude, snr, spectral_convergence
from .specpipe import analyze, load_spectrogram, save_spectrogram
from .utils import log, setup_logging
from .wav_io import WavClip, wav_read, wav_write


def _stream_flags(p: argparse.ArgumentParser):
    p.add_argument("--fft-size", type=int, default=None)
    p.add_argument("--frame-size", type=int, default=None)
    p.add_argument("--frame-step", type=int, default=None)
    p.add_argument("--preemph", type=float, default=None, help="pre-emphasis coefficient (0.97)")
    p.add_argument("--log-delta", type=float, default=None, help="log compression offset (1e-2)")


def _stream_config(args, spec=None) -> StreamConfig:
    if spec is not None:
        base = dict(fft_size=spec.fft_size, frame_size=spec.frame_size, frame_step=spec.frame_step,
                    sample_rate=spec.sample_rate)
    else:
        base = dict(fft_size=args.fft_size, frame_size=args.frame_size, frame_step=args.frame_step)
    return StreamConfig.from_env(preemph_coef=args.preemph, log_delta=args.log_delta, **base)


def _weights(args, cfg: StreamConfig, causal: bool = True):
    graph = build_generator(causal=causal)
    check_config(graph, cfg)
    if args.weights:
        return load_weights(args.weights, graph), graph
    seed = C.env_seed()
    if seed is None:
        raise ConfigError(f"--vocoder {args.vocoder} needs --weights (or SPECINVERT_SEED for random weights)")
    log.warning("no --weights given; using random weights seeded with %d", seed)
    return random_weights(graph, seed), graph


def _gl_config(args, cfg: StreamConfig) -> GlConfig:
    return GlConfig.from_env(base=cfg, w_size=args.wsize, n_iters=args.iters, ind=args.ind)


# -----------------------------
# Commands
# -----------------------------
def cmd_analyze(args) -> int:
    cfg = _stream_config(args)
    clip = wav_read(args.input, cfg.sample_rate)
    spec = analyze(clip.samples, cfg)
    save_spectrogram(spec, args.output)
    print(f"[OK] wrote {args.output} frames={spec.num_frames} bins={spec.num_bins}")
    return 0


def cmd_invert(args) -> int:
    spec = load_spectrogram(args.input)
    cfg = _stream_config(args, spec)
    if args.vocoder == "ngl":
        iters = C.NGL_ITERS if args.iters is None else args.iters
        audio = gl_nonstreaming(spec, iters, cfg=cfg)
    elif args.vocoder == "sgl":
        audio = gl_stream(spec, _gl_config(args, cfg))
    else:
        weights, graph = _weights(args, cfg, causal=args.vocoder == "melgan")
        audio = generator_forward_batch(spec, weights, graph)
    wav_write(args.output, WavClip(np.asarray(audio, dtype=np.float64), cfg.sample_rate))
    print(f"[OK] wrote {args.output} samples={len(audio)} vocoder={args.vocoder}")
    return 0


def cmd_bench(args) -> int:
    spec = load_spectrogram(args.input)
    cfg = _stream_config(args, spec)
    if args.vocoder == "ngl":
        voc = NglVocoder(cfg, C.NGL_ITERS if args.iters is None else args.iters)
    elif args.vocoder == "sgl":
        voc = SglVocoder(_gl_config(args, cfg))
    elif args.vocoder == "melgan":
        weights, graph = _weights(args, cfg)
        voc = MelganVocoder(weights, cfg, graph, args.weights)
    elif args.vocoder == "nmelgan":
        weights, graph = _weights(args, cfg, causal=False)
        voc = NMelganVocoder(weights, cfg, graph, args.weights)
    else:
        voc = NullVocoder(cfg)
    report = run_bench(voc, spec, args.warmup)
    sys.stdout.write(report.to_kv())
    if args.report:
        for path in report.save(args.report):
            print(f"[OK] wrote {path}")
    return 0


def cmd_compare(args) -> int:
    cfg = StreamConfig.from_env(preemph_coef=args.preemph, log_delta=args.log_delta)
    ref = wav_read(args.ref, cfg.sample_rate).samples
    est = wav_read(args.est, cfg.sample_rate).samples
    gain = (1.0 + cfg.preemph_coef) if args.gain is None else args.gain
    ref, est = align(ref, est * gain, args.offset)
    if len(ref) < cfg.frame_size:
        raise ConfigError(f"only {len(ref)} overlapping samples, need {cfg.frame_size}")
    sc = spectral_convergence(reanalysis_magnitude(ref, cfg), reanalysis_magnitude(est, cfg))
    print(f"sc_db={sc:.4f}")
    print(f"snr_db={snr(ref, est):.4f}")
    return 0


def cmd_init_weights(args) -> int:
    graph = build_generator()
    save_weights(random_weights(graph, args.seed), args.output)
    print(f"[OK] wrote {args.output} params={graph.param_count} seed={args.seed}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="specinvert", description="Real-time magnitude spectrogram inversion.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="WAV -> .lms log-magnitude spectrogram")
    p.add_argument("input")
    p.add_argument("output")
    _stream_flags(p)
    p.set_defaults(func=cmd_analyze)

    for name, func, helptext in (("invert", cmd_invert, ".lms -> WAV with a vocoder"),
                                 ("bench", cmd_bench, "delay / latency / RTF report")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("input")
        if name == "invert":
            p.add_argument("output")
            p.add_argument("--vocoder", choices=C.VOCODERS, default="sgl")
        else:
            p.add_argument("--vocoder", choices=C.VOCODERS + ["null"], default="sgl")
            p.add_argument("--report", default=None, help="path prefix for .txt/.json/_latency.csv")
            p.add_argument("--warmup", type=int, default=10, help="untimed hops before measuring")
        p.add_argument("--iters", type=int, default=None, help="GL iterations (sgl 4, ngl 70)")
        p.add_argument("--wsize", type=int, default=None, help="sliding window frames (4)")
        p.add_argument("--ind", type=int, default=None, help="output/commit index (2)")
        p.add_argument("--weights", default=None, help=".gwt file for melgan / nmelgan")
        _stream_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("compare", help="spectral convergence and SNR of est vs ref")
    p.add_argument("ref")
    p.add_argument("est")
    p.add_argument("--offset", type=int, default=0, help="samples to drop from the start of est")
    p.add_argument("--gain", type=float, default=None, help="scale applied to est (default 1 + preemph)")
    p.add_argument("--preemph", type=float, default=None)
    p.add_argument("--log-delta", type=float, default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("init-weights", help="write seeded random generator weights")
    p.add_argument("output")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_init_weights)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        return args.func(args)
    except (SpecInvertError, OSError) as e:
        print(f"specinvert: error: {e}", file=sys.stderr)
        return 1
