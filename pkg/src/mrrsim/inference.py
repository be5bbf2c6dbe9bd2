"""Desk-scale noisy inference on a small 8-bit quantized CNN.

The bundled model (``data/toy_model.json`` + ``toy_model.bin``) classifies 8x8
single-channel patterns into 10 classes with two valid 3x3 convolutions and a
dense layer. Evaluation sets are regenerated from a seed, never stored.

Every tensor is quantized to 8 bits on a ``k / 128`` grid, which coincides
with the signed-digit grid at ``n_t = 7``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ._jsonio import read_json
from .device import MrrParams, NoiseParams
from .errors import ShapeError, ValidationError
from .simulator import MappingMode, OpeConfig, reference_layer, simulate_layer
from .workload import GemmShape, LayerSpec, NetworkSpec

QLEVELS = 128  # 8-bit signed: k / 128, k in [-128, 127]


def quantize8(x: np.ndarray, scale: float) -> np.ndarray:
    """Normalize by ``scale`` and round onto the signed 8-bit grid."""
    return np.clip(np.round(np.asarray(x) / scale * QLEVELS), -QLEVELS, QLEVELS - 1) / QLEVELS


@dataclass
class ToyLayer:
    spec: LayerSpec
    weight: np.ndarray  # float32, GEMM layout (K, N); conv K ordered (k_h, k_w, c_in)
    weight_scale: float
    input_scale: float

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def qweight(self) -> np.ndarray:
        return quantize8(self.weight.astype(float), self.weight_scale)


@dataclass
class ToyModel:
    name: str
    input_shape: tuple[int, int, int]
    num_classes: int
    layers: list[ToyLayer]
    pattern_seed: int
    pattern_noise: float
    n_t: int = 7

    def __post_init__(self) -> None:
        h, w, c = self.input_shape
        for l in self.layers:
            s = l.spec
            if s.kind == "conv":
                if s.c_in != c or (s.h_out, s.w_out) != (h - s.k_h + 1, w - s.k_w + 1):
                    raise ShapeError(f"layer {s.name!r} does not chain from input {(h, w, c)}")
                k, n = s.k_h * s.k_w * s.c_in, s.c_out
                h, w, c = s.h_out, s.w_out, s.c_out
            else:
                if s.m != 1 or s.k != h * w * c:
                    raise ShapeError(f"layer {s.name!r} does not chain from input {(h, w, c)}")
                k, n = s.k, s.n
                h, w, c = 1, 1, s.n
            if l.weight.shape != (k, n):
                raise ShapeError(f"layer {s.name!r}: weight shape {l.weight.shape} != {(k, n)}")
        if c != self.num_classes:
            raise ShapeError("last layer width must equal num_classes")

    def network(self) -> NetworkSpec:
        return NetworkSpec(self.name, tuple(l.spec for l in self.layers))


@dataclass
class EvalSet:
    images: np.ndarray  # (B, H, W, C) in [0, 1)
    labels: np.ndarray  # (B,)
    seed: int

    def __len__(self) -> int:
        return len(self.labels)

    def permuted_labels(self, seed: int = 0) -> "EvalSet":
        return EvalSet(self.images, np.random.default_rng(seed).permutation(self.labels), self.seed)


def bundled_model_path() -> Path:
    return Path(str(resources.files("mrrsim") / "data" / "toy_model.json"))


def load_toy_model(path: str | Path | None = None) -> ToyModel:
    """Read the JSON sidecar and the flat little-endian float32 weight file next to it."""
    path = Path(path) if path is not None else bundled_model_path()
    meta = read_json(path)
    try:
        blob = np.fromfile(path.with_name(meta["weights_file"]), dtype="<f4")
        layers = []
        for entry in meta["layers"]:
            entry = dict(entry)
            offset, rows, cols = entry.pop("offset"), entry.pop("rows"), entry.pop("cols")
            w_scale, in_scale = entry.pop("weight_scale"), entry.pop("input_scale")
            kind, name = entry.pop("kind"), entry.pop("name")
            weight = blob[offset : offset + rows * cols].reshape(rows, cols).copy()
            layers.append(ToyLayer(LayerSpec(kind, name, entry), weight, float(w_scale), float(in_scale)))
        return ToyModel(
            meta["name"], tuple(meta["input_shape"]), int(meta["num_classes"]), layers,
            int(meta["pattern_seed"]), float(meta["pattern_noise"]), int(meta.get("n_t", 7)),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"{path}: malformed model sidecar ({exc})") from exc


def save_toy_model(model: ToyModel, path: str | Path) -> None:
    path = Path(path)
    bin_path = path.with_suffix(".bin")
    entries, chunks, offset = [], [], 0
    for l in model.layers:
        w = np.ascontiguousarray(l.weight, dtype="<f4")
        entries.append({
            **l.spec.to_dict(), "offset": offset, "rows": w.shape[0], "cols": w.shape[1],
            "weight_scale": l.weight_scale, "input_scale": l.input_scale,
        })
        chunks.append(w.ravel())
        offset += w.size
    np.concatenate(chunks).tofile(bin_path)
    meta = {
        "name": model.name, "input_shape": list(model.input_shape), "num_classes": model.num_classes,
        "pattern_seed": model.pattern_seed, "pattern_noise": model.pattern_noise, "n_t": model.n_t,
        "weights_file": bin_path.name, "layers": entries,
    }
    path.write_text(json.dumps(meta, indent=1) + "\n", encoding="utf-8")


def class_patterns(model: ToyModel) -> np.ndarray:
    """Fixed per-class prototypes derived from the model's pattern seed."""
    rng = np.random.default_rng(model.pattern_seed)
    return rng.random((model.num_classes, *model.input_shape))


def make_eval_set(model: ToyModel, seed: int = 0, size: int = 512) -> EvalSet:
    """Noisy copies of the class prototypes, clipped to [0, 1)."""
    rng = np.random.default_rng(seed)
    protos = class_patterns(model)
    labels = rng.integers(0, model.num_classes, size)
    noise = rng.normal(0.0, model.pattern_noise, (size, *model.input_shape))
    images = np.clip(protos[labels] + noise, 0.0, 1.0 - 1.0 / QLEVELS)
    return EvalSet(images, labels, seed)


def _lower(spec: LayerSpec, x: np.ndarray) -> np.ndarray:
    """Rows of GEMM operands for a batch ``x`` of shape (B, H, W, C)."""
    if spec.kind == "gemm":
        return x.reshape(x.shape[0], -1)
    win = sliding_window_view(x, (spec.k_h, spec.k_w), axis=(1, 2))  # B, ho, wo, C, kh, kw
    win = win.transpose(0, 1, 2, 4, 5, 3)
    return win.reshape(x.shape[0] * spec.h_out * spec.w_out, -1)


def _raise(spec: LayerSpec, y: np.ndarray, batch: int) -> np.ndarray:
    if spec.kind == "gemm":
        return y.reshape(batch, 1, 1, -1)
    return y.reshape(batch, spec.h_out, spec.w_out, spec.c_out)


def forward(
    model: ToyModel,
    images: np.ndarray,
    modes: Sequence[MappingMode | None],
    ope: OpeConfig | None = None,
    mrr: MrrParams | None = None,
    noise: NoiseParams | None = None,
    rng: np.random.Generator | None = None,
    trace: bool = False,
):
    """Logits for a batch; ``None`` in ``modes`` runs that layer exactly.

    Layers on the simulated array treat every image as a separate run with its
    own programming events (batch size 1 semantics).
    """
    if len(modes) != len(model.layers):
        raise ShapeError(f"need {len(model.layers)} modes, got {len(modes)}")
    ope = ope or OpeConfig(n_t=model.n_t)
    mrr = mrr or MrrParams()
    noise = noise or NoiseParams()
    if rng is None:
        rng = noise.rng()
    batch = images.shape[0]
    x = quantize8(images, model.layers[0].input_scale)
    acts = [x]
    for i, (layer, mode) in enumerate(zip(model.layers, modes)):
        spec, wq = layer, layer.qweight
        operands = _lower(spec.spec, x)
        if mode is None:
            acc = reference_layer(GemmShape(operands.shape[0], *wq.shape), wq, operands, model.n_t)
        else:
            per = operands.shape[0] // batch
            shape = GemmShape(per, *wq.shape)
            stacked = operands.reshape(batch, per, -1)
            acc = simulate_layer(shape, wq, stacked, mode, ope, mrr, noise, rng).reshape(batch * per, -1)
        y = acc * (layer.input_scale * layer.weight_scale)
        if i + 1 < len(model.layers):
            y = np.maximum(y, 0.0)
            x = quantize8(_raise(spec.spec, y, batch), model.layers[i + 1].input_scale)
        else:
            x = y.reshape(batch, -1)
        acts.append(x)
    return (x, acts) if trace else x


def accuracy_eval(model: ToyModel, eval_set: EvalSet) -> float:
    """Accuracy of the exact quantized forward pass."""
    logits = forward(model, eval_set.images, [None] * len(model.layers))
    return float(np.mean(np.argmax(logits, axis=1) == eval_set.labels))


def run_inference(
    model: ToyModel,
    eval_set: EvalSet,
    modes: Sequence[MappingMode] | MappingMode,
    ope: OpeConfig | None = None,
    mrr: MrrParams | None = None,
    noise: NoiseParams | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Accuracy with every layer executed on the simulated array."""
    if isinstance(modes, (str, MappingMode)):
        modes = [MappingMode(modes)] * len(model.layers)
    modes = [MappingMode(m) for m in modes]
    logits = forward(model, eval_set.images, modes, ope, mrr, noise, rng)
    return float(np.mean(np.argmax(logits, axis=1) == eval_set.labels))


def layer_degradation_profile(
    model: ToyModel,
    eval_set: EvalSet,
    layer: int,
    mode: MappingMode,
    reps: int = 5,
    seeds: Sequence[int] | None = None,
    ope: OpeConfig | None = None,
    mrr: MrrParams | None = None,
    noise: NoiseParams | None = None,
) -> float:
    """Accuracy loss in percentage points with only ``layer`` on the noisy array.

    Averaged over ``reps`` repetitions, each with its own generator
    ``noise.rng(seed)``; floored at 0.
    """
    if not 0 <= layer < len(model.layers):
        raise ShapeError(f"layer index {layer} out of range")
    noise = noise or NoiseParams()
    seeds = list(seeds) if seeds is not None else list(range(reps))
    clean = accuracy_eval(model, eval_set)
    modes: list[MappingMode | None] = [None] * len(model.layers)
    modes[layer] = MappingMode(mode)
    accs = []
    for s in seeds:
        logits = forward(model, eval_set.images, modes, ope, mrr, noise, noise.rng(s))
        accs.append(np.mean(np.argmax(logits, axis=1) == eval_set.labels))
    return max(0.0, 100.0 * (clean - float(np.mean(accs))))
