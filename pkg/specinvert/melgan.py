"""
melgan.py — inference-only MelGAN generator with causal convolutions.

Topology (defaults):
  in_conv   conv1D 1025 -> 512, ks 7
  up0..up3  elu + conv1Dtranspose (256,10,5) (128,10,5) (64,8,4) (32,4,2)
            + 3 residual blocks (ks 3, dilation 1, 3, 9):
              skip + conv_pw(conv_dil(elu(skip)))
  out_conv  elu + conv1D 32 -> 1, ks 7

One input frame -> 5*5*4*2 = 200 samples. Every convolution is causal: output
step t reads inputs <= t (zero left padding of (ks-1)*dilation). A transposed
convolution places input step t at output steps [t*stride, t*stride + ks) and
emits the first t*stride.. samples; the tail that belongs to future steps is
held in an overlap accumulator while streaming and dropped at the end of a batch.

With `causal=False` (batch only) convs are padded symmetrically and transposed
convs centred, giving the non-streaming reference generator.

Kernels are stored (ks, ch_in, ch_out), biases (ch_out,), all float32.
Canonical tensor names: "<layer>.kernel" / "<layer>.bias", where <layer> is
in_conv, up{i}.tconv, up{i}.res{j}.conv_dil, up{i}.res{j}.conv_pw, out_conv.

.gwt layout (all little-endian):
  "GWT1" | u32 version=1 | u32 tensor_count
  | repeated { u16 name_len | utf-8 name | u8 rank | rank x u32 dims | float32 values }
"""

import struct
from dataclasses import dataclass, replace
from typing import Dict, List, Tuple

import numpy as np

from .config import (FRAME_STEP, IN_CONV, OUT_KS, RES_DILATIONS, RES_KS,
                     UPSCALE_BLOCKS, StreamConfig)
from .errors import (BadMagicError, ConfigError, FormatError, ShapeMismatchError,
                     SignalError, TruncatedFileError, UnknownLayerError,
                     VersionMismatchError)
from .specpipe import LogMagSpectrogram
from .utils import atomic_write_bytes, log

GWT_MAGIC = b"GWT1"
GWT_VERSION = 1


# -----------------------------
# Architecture
# -----------------------------
@dataclass(frozen=True)
class LayerSpec:
    name: str
    kind: str          # conv | tconv | res_dil | res_pw
    ch_in: int
    ch_out: int
    ks: int
    stride: int = 1
    dilation: int = 1
    pre_elu: bool = False

    @property
    def kernel_shape(self) -> Tuple[int, int, int]:
        return (self.ks, self.ch_in, self.ch_out)

    @property
    def num_params(self) -> int:
        return self.ks * self.ch_in * self.ch_out + self.ch_out

    @property
    def receptive_steps(self) -> int:
        """Past input steps a causal conv keeps; 0 for transposed convs."""
        return 0 if self.kind == "tconv" else (self.ks - 1) * self.dilation

    @property
    def pending_steps(self) -> int:
        """Future output steps a transposed conv holds back."""
        return max(self.ks - self.stride, 0) if self.kind == "tconv" else 0

    @property
    def centre_shift(self) -> int:
        """Future steps read with centred padding: right pad of a conv, output shift of a tconv."""
        if self.kind == "tconv":
            return self.pending_steps // 2
        return self.receptive_steps - self.receptive_steps // 2


@dataclass(frozen=True)
class GeneratorArch:
    layers: Tuple[LayerSpec, ...]
    in_channels: int = 1025
    frame_step: int = FRAME_STEP
    causal: bool = True

    @classmethod
    def from_blocks(cls, in_channels=1025, in_conv=IN_CONV, blocks=UPSCALE_BLOCKS,
                    res_dilations=RES_DILATIONS, res_ks=RES_KS, out_ks=OUT_KS,
                    frame_step=FRAME_STEP, causal=True) -> "GeneratorArch":
        ch, ks = in_conv
        layers = [LayerSpec("in_conv", "conv", in_channels, ch, ks)]
        for i, (out_ch, bks, stride) in enumerate(blocks):
            layers.append(LayerSpec(f"up{i}.tconv", "tconv", ch, out_ch, bks, stride=stride, pre_elu=True))
            ch = out_ch
            for j, dil in enumerate(res_dilations):
                layers.append(LayerSpec(f"up{i}.res{j}.conv_dil", "res_dil", ch, ch, res_ks,
                                        dilation=dil, pre_elu=True))
                layers.append(LayerSpec(f"up{i}.res{j}.conv_pw", "res_pw", ch, ch, 1))
        layers.append(LayerSpec("out_conv", "conv", ch, 1, out_ks, pre_elu=True))
        return cls(tuple(layers), in_channels, frame_step, causal)

    @classmethod
    def default(cls) -> "GeneratorArch":
        return cls.from_blocks()

    def without(self, prefix: str) -> "GeneratorArch":
        """Copy of this arch with every layer under `prefix` removed."""
        kept = tuple(l for l in self.layers if not l.name.startswith(prefix + "."))
        return replace(self, layers=kept)

    @property
    def upsample_factor(self) -> int:
        return int(np.prod([l.stride for l in self.layers if l.kind == "tconv"] or [1]))


@dataclass(frozen=True)
class GeneratorGraph:
    arch: GeneratorArch
    param_count: int

    @property
    def layers(self) -> Tuple[LayerSpec, ...]:
        return self.arch.layers

    @property
    def samples_per_frame(self) -> int:
        return self.arch.upsample_factor

    @property
    def in_channels(self) -> int:
        return self.arch.in_channels

    @property
    def causal(self) -> bool:
        return self.arch.causal

    @property
    def lookahead_samples(self) -> int:
        """Output samples of future context the centred graph reads; 0 when causal."""
        if self.causal:
            return 0
        rate, total = 1, 0
        for l in self.layers:
            rate *= l.stride
            total += l.centre_shift * (self.arch.frame_step // rate)
        return total

    def tensor_shapes(self) -> Dict[str, Tuple[int, ...]]:
        shapes = {}
        for l in self.layers:
            shapes[f"{l.name}.kernel"] = l.kernel_shape
            shapes[f"{l.name}.bias"] = (l.ch_out,)
        return shapes

    def state_bytes(self) -> int:
        total = 0
        for l in self.layers:
            total += (l.receptive_steps * l.ch_in + l.pending_steps * l.ch_out) * 4
        return total


def build_generator(arch: GeneratorArch = None, causal: bool = None) -> GeneratorGraph:
    """Validate `arch` and count its parameters; `causal` overrides arch.causal."""
    arch = arch or GeneratorArch.default()
    if causal is not None:
        arch = replace(arch, causal=causal)
    layers = arch.layers
    if not layers:
        raise ConfigError("generator has no layers")
    if layers[0].ch_in != arch.in_channels:
        raise ConfigError(f"first layer takes {layers[0].ch_in} channels, input has {arch.in_channels}")
    ch = arch.in_channels
    for i, l in enumerate(layers):
        if l.kind not in ("conv", "tconv", "res_dil", "res_pw"):
            raise ConfigError(f"{l.name}: unknown layer kind {l.kind!r}")
        if l.ks < 1 or l.stride < 1 or l.dilation < 1:
            raise ConfigError(f"{l.name}: ks/stride/dilation must be >= 1")
        if l.ch_in != ch:
            raise ConfigError(f"{l.name}: expects {l.ch_in} input channels, previous layer gives {ch}")
        if l.kind in ("res_dil", "res_pw") and l.ch_in != l.ch_out:
            raise ConfigError(f"{l.name}: residual convs must keep {l.ch_in} channels")
        if l.kind != "tconv" and l.stride != 1:
            raise ConfigError(f"{l.name}: only transposed convs may have stride > 1")
        if l.kind == "res_dil" and (i + 1 >= len(layers) or layers[i + 1].kind != "res_pw"):
            raise ConfigError(f"{l.name}: dilated conv must be followed by its pointwise conv")
        if l.kind == "res_pw" and (i == 0 or layers[i - 1].kind != "res_dil"):
            raise ConfigError(f"{l.name}: pointwise conv without a preceding dilated conv")
        ch = l.ch_out
    if ch != 1:
        raise ConfigError(f"generator must end with 1 channel, ends with {ch}")
    if arch.upsample_factor != arch.frame_step:
        raise ConfigError(f"stride product {arch.upsample_factor} != frame_step {arch.frame_step}")
    count = sum(l.num_params for l in layers)
    log.info("generator built: %d layers, %d parameters", len(layers), count)
    return GeneratorGraph(arch, count)


def param_count(arch: GeneratorArch = None) -> int:
    return build_generator(arch).param_count


# -----------------------------
# Weights
# -----------------------------
class WeightSet(dict):
    """Tensor name -> float32 array."""

    def nbytes(self) -> int:
        return int(sum(v.nbytes for v in self.values()))

    def check(self, graph: GeneratorGraph):
        shapes = graph.tensor_shapes()
        for name, arr in self.items():
            if name not in shapes:
                raise UnknownLayerError(f"unknown tensor {name!r}")
            if tuple(arr.shape) != shapes[name]:
                raise ShapeMismatchError(f"{name}: shape {tuple(arr.shape)}, expected {shapes[name]}")
        missing = sorted(set(shapes) - set(self))
        if missing:
            raise FormatError(f"missing {len(missing)} tensor(s), first: {missing[0]}")
        return self


def random_weights(graph: GeneratorGraph = None, seed: int = 0) -> WeightSet:
    graph = graph or build_generator()
    rng = np.random.default_rng(seed)
    w = WeightSet()
    for l in graph.layers:
        scale = 1.0 / np.sqrt(l.ks * l.ch_in)
        if l.kind == "res_pw":
            scale *= 0.1  # keeps the residual stack near identity
        w[f"{l.name}.kernel"] = (rng.standard_normal(l.kernel_shape) * scale).astype(np.float32)
        w[f"{l.name}.bias"] = (rng.standard_normal(l.ch_out) * 0.01).astype(np.float32)
    return w


def save_weights(weights: Dict[str, np.ndarray], path: str):
    parts = [GWT_MAGIC, struct.pack("<II", GWT_VERSION, len(weights))]
    for name, arr in weights.items():
        raw = name.encode("utf-8")
        arr = np.ascontiguousarray(arr, dtype="<f4")
        parts.append(struct.pack("<H", len(raw)) + raw + struct.pack("<B", arr.ndim))
        parts.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        parts.append(arr.tobytes())
    atomic_write_bytes(path, b"".join(parts))


class _Reader:
    def __init__(self, blob: bytes, path: str):
        self.blob, self.path, self.pos = blob, path, 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.blob):
            raise TruncatedFileError(f"{self.path}: truncated while reading {what} at byte {self.pos}")
        out = self.blob[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def load_weights(path: str, graph: GeneratorGraph = None) -> WeightSet:
    with open(path, "rb") as f:
        r = _Reader(f.read(), path)
    if r.blob[:4] != GWT_MAGIC:
        raise BadMagicError(f"{path}: not a weights file (magic {r.blob[:4]!r}, expected {GWT_MAGIC!r})")
    r.pos = 4
    version, count = r.unpack("<II", "header")
    if version != GWT_VERSION:
        raise VersionMismatchError(f"{path}: version {version}, this reader supports {GWT_VERSION}")
    w = WeightSet()
    for _ in range(count):
        (name_len,) = r.unpack("<H", "name length")
        name = r.take(name_len, "tensor name").decode("utf-8")
        (rank,) = r.unpack("<B", f"{name} rank")
        dims = r.unpack(f"<{rank}I", f"{name} dims")
        n = int(np.prod(dims)) if rank else 1
        values = np.frombuffer(r.take(4 * n, f"{name} values"), dtype="<f4")
        w[name] = values.reshape(dims).astype(np.float32)
    if graph is not None:
        w.check(graph)
    return w


# -----------------------------
# Kernels
# -----------------------------
def elu(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0, x, np.expm1(np.minimum(x, 0))).astype(np.float32)


def _conv_valid(xp: np.ndarray, kernel: np.ndarray, bias: np.ndarray, dilation: int) -> np.ndarray:
    """Causal conv over an already left-padded input; tap ks-1 reads the current step."""
    ks = kernel.shape[0]
    T = xp.shape[0] - (ks - 1) * dilation
    out = np.broadcast_to(bias, (T, kernel.shape[2])).astype(np.float32)
    for k in range(ks):
        out += xp[k * dilation:k * dilation + T] @ kernel[k]
    return out


def _tconv_full(x: np.ndarray, kernel: np.ndarray, stride: int) -> np.ndarray:
    """Transposed conv without bias, full length (T-1)*stride + ks (at least T*stride)."""
    T = x.shape[0]
    ks = kernel.shape[0]
    y = np.zeros((max((T - 1) * stride + ks, T * stride), kernel.shape[2]), dtype=np.float32)
    for k in range(ks):
        y[k:k + (T - 1) * stride + 1:stride] += x @ kernel[k]
    return y


def _frames_in(spec, graph: GeneratorGraph) -> np.ndarray:
    frames = spec.frames if isinstance(spec, LogMagSpectrogram) else spec
    frames = np.asarray(frames, dtype=np.float32)
    if frames.ndim == 1:
        frames = frames[None, :]
    if frames.ndim != 2 or frames.shape[1] != graph.in_channels:
        raise SignalError(f"expected frames of {graph.in_channels} bins, got shape {frames.shape}")
    if not np.all(np.isfinite(frames)):
        raise SignalError("input frames have non-finite values")
    return frames


def _run(frames, weights, graph, conv_state=None, tconv_state=None, trace=None):
    """Shared layer walk; `*_state` dicts are updated in place when streaming."""
    h = frames
    skip = None
    for l in graph.layers:
        kern = weights[f"{l.name}.kernel"]
        bias = weights[f"{l.name}.bias"]
        x = elu(h) if l.pre_elu else h
        if l.kind == "tconv":
            y = _tconv_full(x, kern, l.stride)
            n = x.shape[0] * l.stride
            if tconv_state is not None:
                pend = tconv_state[l.name]
                y[:len(pend)] += pend
                tconv_state[l.name] = y[n:n + l.pending_steps].copy()
            shift = 0 if graph.causal else l.centre_shift
            h = y[shift:shift + n] + bias
        else:
            L = l.receptive_steps
            if conv_state is not None:
                xp = np.concatenate([conv_state[l.name], x])
                if L:
                    conv_state[l.name] = xp[-L:].copy()
            else:
                right = 0 if graph.causal else l.centre_shift
                xp = np.concatenate([np.zeros((L - right, x.shape[1]), dtype=np.float32), x,
                                     np.zeros((right, x.shape[1]), dtype=np.float32)])
            if l.kind == "res_dil":
                skip = h
            h = _conv_valid(xp, kern, bias, l.dilation)
            if l.kind == "res_pw":
                h = skip + h
        if trace is not None:
            trace.append((l.name, h))
    return h[:, 0]


def generator_forward_batch(spec, weights: WeightSet, graph: GeneratorGraph = None,
                            trace: List = None) -> np.ndarray:
    """N frames -> 200*N samples (float32). Pass a list as `trace` to collect per-layer outputs.

    A non-causal graph pads every conv symmetrically and centres every transposed
    conv, so sample t also reads up to `graph.lookahead_samples` of future input.
    """
    graph = graph or build_generator()
    weights = WeightSet(weights).check(graph)
    return _run(_frames_in(spec, graph), weights, graph, trace=trace)


class GeneratorStreamState:
    """Per-layer causal buffers for one stream."""

    def __init__(self, weights: WeightSet, graph: GeneratorGraph = None):
        self.graph = graph or build_generator()
        if not self.graph.causal:
            raise ConfigError("a non-causal generator reads future frames and can only run in batch")
        self.weights = WeightSet(weights).check(self.graph)
        self.reset()

    def reset(self):
        self.conv_state = {l.name: np.zeros((l.receptive_steps, l.ch_in), dtype=np.float32)
                           for l in self.graph.layers if l.kind != "tconv"}
        self.tconv_state = {l.name: np.zeros((l.pending_steps, l.ch_out), dtype=np.float32)
                            for l in self.graph.layers if l.kind == "tconv"}
        self.frames_pushed = 0

    # a causal generator has no look-ahead and no overlap delay
    lookahead_samples = 0
    total_delay_samples = 0
    output_offset_samples = 0

    def nbytes(self) -> int:
        return self.graph.state_bytes() + self.weights.nbytes()

    def push(self, frames) -> np.ndarray:
        """One frame (or a chunk of k frames) -> 200*k samples."""
        x = _frames_in(frames, self.graph)
        out = _run(x, self.weights, self.graph, self.conv_state, self.tconv_state)
        self.frames_pushed += x.shape[0]
        return out

    def flush(self) -> np.ndarray:
        out = np.zeros(0, dtype=np.float32)
        self.reset()
        return out


def generator_stream_push(state: GeneratorStreamState, frame) -> np.ndarray:
    return state.push(frame)


def check_config(graph: GeneratorGraph, cfg: StreamConfig):
    if graph.in_channels != cfg.num_bins or graph.samples_per_frame != cfg.frame_step:
        raise ConfigError(
            f"generator ({graph.in_channels} bins, {graph.samples_per_frame} samples/frame) does not "
            f"match stream config ({cfg.num_bins} bins, {cfg.frame_step} samples/frame)")
