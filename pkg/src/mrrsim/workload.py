"""Workload descriptions: layer shapes, conv->GEMM lowering and bundled networks.

File format::

    {"name": "net", "layers": [
        {"kind": "conv", "name": "c1", "c_in": 3, "c_out": 64,
         "k_h": 11, "k_w": 11, "h_out": 55, "w_out": 55},
        {"kind": "gemm", "name": "fc", "m": 1, "k": 4096, "n": 1000}]}

Batch size is 1 throughout; stride and padding are folded into ``h_out``/``w_out``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from ._jsonio import read_json
from .errors import ShapeError, ValidationError

CONV_DIMS = ("c_in", "c_out", "k_h", "k_w", "h_out", "w_out")
GEMM_DIMS = ("m", "k", "n")

BUILTIN_NAMES = ("alexnet", "vgg16", "resnet18", "mobilenet_v3_small", "gpt2_medium", "vit_base")
CNN_NAMES = BUILTIN_NAMES[:4]


@dataclass(frozen=True)
class GemmShape:
    """``(M x K) @ (K x N)``: M streamed vectors, K reduction, N outputs per vector."""

    m: int
    k: int
    n: int

    def __post_init__(self) -> None:
        if min(self.m, self.k, self.n) < 1:
            raise ShapeError(f"GEMM dims must be >= 1, got {(self.m, self.k, self.n)}")

    @property
    def macs(self) -> int:
        return self.m * self.k * self.n


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    name: str
    dims: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        expected = {"conv": CONV_DIMS, "gemm": GEMM_DIMS}.get(self.kind)
        if expected is None:
            raise ValidationError(f"layer {self.name!r}: kind must be 'conv' or 'gemm'")
        if set(self.dims) != set(expected):
            raise ValidationError(
                f"layer {self.name!r}: expected dims {list(expected)}, got {sorted(self.dims)}"
            )
        bad = [k for k, v in self.dims.items() if isinstance(v, bool) or not isinstance(v, int) or v < 1]
        if bad:
            raise ValidationError(f"layer {self.name!r}: dims {bad} must be integers >= 1")

    def __getattr__(self, item: str) -> int:
        dims = self.__dict__.get("dims", {})
        if item in dims:
            return dims[item]
        raise AttributeError(item)

    @classmethod
    def conv(cls, name: str, c_in: int, c_out: int, k_h: int, k_w: int, h_out: int, w_out: int) -> "LayerSpec":
        return cls("conv", name, dict(c_in=c_in, c_out=c_out, k_h=k_h, k_w=k_w, h_out=h_out, w_out=w_out))

    @classmethod
    def gemm(cls, name: str, m: int, k: int, n: int) -> "LayerSpec":
        return cls("gemm", name, dict(m=m, k=k, n=n))

    def to_dict(self) -> dict[str, Any]:
        order = CONV_DIMS if self.kind == "conv" else GEMM_DIMS
        return {"kind": self.kind, "name": self.name, **{k: self.dims[k] for k in order}}


@dataclass(frozen=True)
class NetworkSpec:
    name: str
    layers: tuple[LayerSpec, ...]

    def __post_init__(self) -> None:
        if not self.layers:
            raise ValidationError(f"network {self.name!r} has no layers")

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "layers": [l.to_dict() for l in self.layers]}

    def gemms(self) -> list[GemmShape]:
        return [conv_to_gemm(l) for l in self.layers]


def conv_to_gemm(l: LayerSpec) -> GemmShape:
    """im2col lowering: output pixels x (kernel area * c_in) x c_out."""
    if l.kind == "gemm":
        return GemmShape(l.m, l.k, l.n)
    if l.kind != "conv":
        raise ShapeError(f"cannot lower layer kind {l.kind!r}")
    return GemmShape(l.h_out * l.w_out, l.k_h * l.k_w * l.c_in, l.c_out)


def network_from_dict(data: Any, source: str = "<dict>") -> NetworkSpec:
    if not isinstance(data, dict):
        raise ValidationError(f"{source}: top level must be an object")
    unknown = sorted(set(data) - {"name", "layers"})
    if unknown:
        raise ValidationError(f"{source}: unknown top-level field(s) {unknown}")
    if not isinstance(data.get("name"), str):
        raise ValidationError(f"{source}: 'name' must be a string")
    raw = data.get("layers")
    if not isinstance(raw, list) or not raw:
        raise ValidationError(f"{source}: 'layers' must be a nonempty list")
    layers, problems = [], []
    for i, entry in enumerate(raw):
        label = entry.get("name", f"#{i}") if isinstance(entry, dict) else f"#{i}"
        try:
            if not isinstance(entry, dict):
                raise ValidationError("layer must be an object")
            entry = dict(entry)
            kind, name = entry.pop("kind", None), entry.pop("name", None)
            if not isinstance(name, str):
                raise ValidationError("'name' must be a string")
            layers.append(LayerSpec(kind, name, entry))
        except ValidationError as exc:
            problems.append(f"layer {i} ({label}): {exc}")
    if problems:
        raise ValidationError(f"{source}: invalid layers:\n  " + "\n  ".join(problems))
    return NetworkSpec(data["name"], tuple(layers))


def load_network(path: str | Path) -> NetworkSpec:
    return network_from_dict(read_json(path), str(path))


def save_network(spec: NetworkSpec, path: str | Path) -> None:
    Path(path).write_text(dumps_network(spec), encoding="utf-8")


def dumps_network(spec: NetworkSpec) -> str:
    return json.dumps(spec.to_dict(), indent=1) + "\n"


def builtin_path(name: str) -> Path:
    return Path(str(resources.files("mrrsim") / "data" / "workloads" / f"{name}.json"))


def builtin_workloads() -> list[NetworkSpec]:
    """Bundled descriptors: four CNNs followed by two transformer GEMM sets."""
    return [load_network(builtin_path(n)) for n in BUILTIN_NAMES]
