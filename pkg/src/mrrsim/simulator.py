"""Behavioral simulation of a tiled MRR array executing one GEMM layer.

The array has ``tiles * rows`` MRR rows sharing ``cols`` wavelength channels.
One operand is programmed onto the weighting MRRs (slow thermo-optic tuning,
noisy); the other is streamed through the fast modulators as signed digits
(exact). ``MappingMode`` decides which is which.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum
from math import ceil
from typing import Iterator, NamedTuple

import numpy as np

from .device import MrrParams, NoiseParams, noisy_weight, voltage_from_weight
from .encoding import encode_digits, osa_matmul, quantize
from .errors import ConfigError, RangeError, ShapeError
from .workload import GemmShape

MAX_COLUMNS = 8


class MappingMode(str, Enum):
    WS = "ws"  # weights on MRRs, inputs streamed as digits
    IS = "is"  # inputs on MRRs, weights streamed as digits
    ANALOG = "analog"  # both operands through the thermo-optic chain

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class OpeConfig:
    tiles: int = 1
    rows: int = 8
    cols: int = 8
    n_t: int = 7
    clock_hz: float = 5e9
    osa_enabled: bool = True
    t_to: float = 7.5e-6
    t_eo: float = 200e-12
    osa_stage_loss: float = 1.0

    def __post_init__(self) -> None:
        if min(self.tiles, self.rows, self.cols) < 1:
            raise ConfigError("tiles, rows and cols must be >= 1")
        if self.cols > MAX_COLUMNS:
            raise ConfigError(f"cols (wavelength channels) must be <= {MAX_COLUMNS}")
        if self.n_t < 0:
            raise ConfigError("n_t must be >= 0")
        if self.clock_hz <= 0:
            raise ConfigError("clock_hz must be positive")
        if not self.t_to >= self.t_eo > 0:
            raise ConfigError("require t_to >= t_eo > 0")
        if not 0 < self.osa_stage_loss <= 1:
            raise ConfigError("osa_stage_loss must lie in (0, 1]")

    @property
    def n_lambda(self) -> int:
        return self.cols

    @property
    def parallel_rows(self) -> int:
        return self.tiles * self.rows

    @property
    def total_mrrs(self) -> int:
        return self.tiles * self.rows * self.cols

    def to_dict(self) -> dict:
        return asdict(self)


class Tile(NamedTuple):
    """One programming of the array: reduction slice [k0, k1) x stationary slice [s0, s1)."""

    k0: int
    k1: int
    s0: int
    s1: int


def stationary_extent(layer: GemmShape, mode: MappingMode) -> tuple[int, int]:
    """(stationary outer dim, streamed count): (N, M) for WS, (M, N) for IS."""
    if mode is MappingMode.IS:
        return layer.m, layer.n
    return layer.n, layer.m


def tile_schedule(layer: GemmShape, ope: OpeConfig, mode: MappingMode) -> Iterator[Tile]:
    """Stationary tiles in execution order: stationary chunks outer, reduction inner."""
    s_dim, _ = stationary_extent(layer, mode)
    rows = ope.parallel_rows
    for sc in range(ceil(s_dim / rows)):
        s0, s1 = sc * rows, min((sc + 1) * rows, s_dim)
        for kc in range(ceil(layer.k / ope.cols)):
            yield Tile(kc * ope.cols, min((kc + 1) * ope.cols, layer.k), s0, s1)


def program_tile(
    values: np.ndarray, p: MrrParams, n: NoiseParams, rng: np.random.Generator
) -> np.ndarray:
    """Realized weights after programming an R x C block of targets onto MRRs."""
    values = np.asarray(values, dtype=float)
    if np.any((values < p.q_min) | (values > p.q_max)):
        raise RangeError(f"tile values must lie in [{p.q_min}, {p.q_max}]")
    return noisy_weight(voltage_from_weight(values, p), p, n, rng)


def _check_operands(layer: GemmShape, weights: np.ndarray, inputs: np.ndarray) -> None:
    if weights.shape != (layer.k, layer.n):
        raise ShapeError(f"weights must be {(layer.k, layer.n)}, got {weights.shape}")
    if inputs.shape[-2:] != (layer.m, layer.k) or inputs.ndim not in (2, 3):
        raise ShapeError(f"inputs must be {(layer.m, layer.k)} or (B, {layer.m}, {layer.k}), got {inputs.shape}")
    if np.any(np.abs(weights) > 1) or np.any(np.abs(inputs) > 1):
        raise RangeError("operands must be normalized to [-1, 1]")


def simulate_layer(
    layer: GemmShape,
    weights: np.ndarray,
    inputs: np.ndarray,
    mode: MappingMode,
    ope: OpeConfig,
    p: MrrParams,
    n: NoiseParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """``inputs (M x K) @ weights (K x N)`` as executed on the array.

    Noise is drawn per MRR per programming event, tile by tile in
    :func:`tile_schedule` order. Partial sums across reduction tiles are
    accumulated exactly.

    ``inputs`` may carry a leading batch axis ``(B, M, K)``; each batch entry
    is an independent run of the layer with its own programming events.
    """
    weights = np.asarray(weights, dtype=float)
    inputs = np.asarray(inputs, dtype=float)
    _check_operands(layer, weights, inputs)
    mode = MappingMode(mode)
    batched = inputs.ndim == 3
    x = inputs if batched else inputs[None]
    b = x.shape[0]
    out = np.zeros((b, layer.m, layer.n))
    loss = ope.osa_stage_loss

    if mode is MappingMode.ANALOG:
        x_real = program_tile(x, p, n, rng)
        volts = voltage_from_weight(weights, p)
        for k0, k1, s0, s1 in tile_schedule(layer, ope, mode):
            tile_v = np.broadcast_to(volts[k0:k1, s0:s1].T, (b, s1 - s0, k1 - k0))
            w_real = noisy_weight(tile_v, p, n, rng).transpose(0, 2, 1)
            out[:, :, s0:s1] += x_real[:, :, k0:k1] @ w_real
        return out if batched else out[0]

    # the voltage inverse is per element, so computing it once up front
    # leaves the per-tile noise draws unchanged
    if mode is MappingMode.WS:
        stationary = np.broadcast_to(voltage_from_weight(weights.T, p), (b, layer.n, layer.k))
        digits = encode_digits(x, ope.n_t)  # (B, M, K, slots)
    else:
        stationary = voltage_from_weight(x, p)  # (B, M, K)
        digits = np.broadcast_to(encode_digits(weights.T, ope.n_t), (b, layer.n, layer.k, ope.n_t + 1))
    acc = np.zeros((b, digits.shape[1], stationary.shape[1]))
    for k0, k1, s0, s1 in tile_schedule(layer, ope, mode):
        realized = noisy_weight(stationary[:, s0:s1, k0:k1], p, n, rng)  # B x rows x cols
        acc[:, :, s0:s1] += osa_matmul(digits[:, :, k0:k1], realized.transpose(0, 2, 1), ope.n_t, loss)
    if mode is MappingMode.IS:
        acc = acc.transpose(0, 2, 1)
    return acc if batched else acc[0]


def reference_layer(layer: GemmShape, weights: np.ndarray, inputs: np.ndarray, n_t: int) -> np.ndarray:
    """Noise-free GEMM over signed-digit-quantized operands."""
    weights = np.asarray(weights, dtype=float)
    inputs = np.asarray(inputs, dtype=float)
    _check_operands(layer, weights, inputs)
    return quantize(inputs, n_t) @ quantize(weights, n_t)
