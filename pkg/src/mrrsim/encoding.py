"""Balanced signed-digit input encoding and optical shift-and-add accumulation.

A stream for precision ``n_t`` carries ``n_t + 1`` digits in {-1, 0, +1}.
Digit ``t`` (0 = least significant) carries weight ``2**(t - n_t)``, so the
most significant digit is worth 1 and the stream can represent multiples of
``2**-n_t`` in (-2, 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike

from .errors import RangeError, ShapeError


@dataclass(frozen=True)
class DigitStream:
    digits: tuple[int, ...]  # index t = 0 is least significant
    n_t: int

    def __post_init__(self) -> None:
        if self.n_t < 0:
            raise RangeError("n_t must be non-negative")
        if len(self.digits) != self.n_t + 1:
            raise ShapeError(f"expected {self.n_t + 1} digits, got {len(self.digits)}")
        if any(d not in (-1, 0, 1) for d in self.digits):
            raise RangeError("digits must be -1, 0 or +1")

    def __neg__(self) -> "DigitStream":
        return DigitStream(tuple(-d for d in self.digits), self.n_t)


def slot_scales(n_t: int, stage_loss: float = 1.0) -> np.ndarray:
    """Power scaling applied to each time slot by the splitter/delay chain.

    Slot ``t`` passes ``n_t - t`` halving stages; ``stage_loss`` is an extra
    per-stage transmission factor (1.0 models ideal splitters and delay lines).
    """
    stages = n_t - np.arange(n_t + 1)
    return np.ldexp(1.0, -stages) * stage_loss**stages


def encode_digits(x: ArrayLike, n_t: int) -> np.ndarray:
    """Greedy most-significant-first encoding of an array.

    Returns int8 digits with shape ``x.shape + (n_t + 1,)``. Accepts the closed
    interval [-1, 1]; ties between candidate digits resolve toward 0, which
    keeps the encoding odd-symmetric.
    """
    if n_t < 0:
        raise RangeError("n_t must be non-negative")
    r = np.array(x, dtype=float, copy=True)
    if np.any(np.abs(r) > 1) or np.any(np.isnan(r)):
        raise RangeError("values to encode must lie in [-1, 1]")
    out = np.zeros(r.shape + (n_t + 1,), dtype=np.int8)
    for t in range(n_t, -1, -1):
        step = np.ldexp(1.0, t - n_t)
        # choose +-1 only if it strictly shrinks the residual
        d = np.where(np.abs(r - np.sign(r) * step) < np.abs(r), np.sign(r), 0.0)
        out[..., t] = d
        r = r - d * step
    return out


def decode_digits(digits: np.ndarray, n_t: int) -> np.ndarray | float:
    """Value of digit arrays produced by :func:`encode_digits`."""
    digits = np.asarray(digits)
    if digits.shape[-1] != n_t + 1:
        raise ShapeError("last axis must hold n_t + 1 digits")
    val = digits.astype(float) @ slot_scales(n_t)
    return float(val) if np.ndim(val) == 0 else val


def quantize(x: ArrayLike, n_t: int) -> np.ndarray | float:
    """Round-trip ``x`` through the signed-digit code."""
    return decode_digits(encode_digits(x, n_t), n_t)


def encode_signed_digits(x: float, n_t: int) -> DigitStream:
    """Encode a normalized scalar ``|x| < 1`` into ``n_t + 1`` balanced digits."""
    if not abs(x) < 1:
        raise RangeError(f"|x| must be < 1, got {x}")
    if n_t < 0:
        raise RangeError("n_t must be non-negative")
    # scalar twin of encode_digits (same greedy rule, no array overhead)
    r, digits = float(x), [0] * (n_t + 1)
    for t in range(n_t, -1, -1):
        step = math.ldexp(1.0, t - n_t)
        s = 1 if r > 0 else -1
        if abs(r - s * step) < abs(r):
            digits[t] = s
            r -= s * step
    return DigitStream(tuple(digits), n_t)


def decode_value(s: DigitStream) -> float:
    """Exact value of a digit stream (powers of two, so binary-exact)."""
    return math.fsum(d * math.ldexp(1.0, t - s.n_t) for t, d in enumerate(s.digits))


def osa_mac(
    weights: Sequence[float], inputs: Sequence[DigitStream], stage_loss: float = 1.0
) -> float:
    """Shift-and-add multiply-accumulate over ``len(weights)`` wavelength channels.

    Each time slot forms the products ``w_k * b_{k,t}`` on every channel, the
    delay chain scales slot ``t`` by ``2**(t - n_t)`` and a single detection sums
    all slots and channels.
    """
    if len(weights) != len(inputs):
        raise ShapeError("weights and inputs must have the same length")
    if not inputs:
        return 0.0
    n_t = inputs[0].n_t
    if any(s.n_t != n_t for s in inputs):
        raise ShapeError("all input streams must share the same n_t")
    w = np.asarray(weights, dtype=float)
    b = np.array([s.digits for s in inputs], dtype=float)  # (N_lambda, n_t + 1)
    slot_products = w[:, None] * b
    detected = slot_products.sum(axis=0) @ slot_scales(n_t, stage_loss)
    return float(detected)


def osa_matmul(
    digits: np.ndarray, weights: np.ndarray, n_t: int, stage_loss: float = 1.0
) -> np.ndarray:
    """Array form of :func:`osa_mac`: ``digits (..., M, K, n_t+1)`` against ``weights (..., K, N)``.

    Per-slot partial products are formed as ``M x N`` matrices and combined by
    the slot scaling, one detection per output. Leading axes broadcast.
    """
    if (
        digits.ndim < 3
        or digits.shape[-2] != weights.shape[-2]
        or digits.shape[-1] != n_t + 1
    ):
        raise ShapeError(f"incompatible operands {digits.shape} and {weights.shape}")
    scales = slot_scales(n_t, stage_loss)
    slots = np.moveaxis(digits, -1, -3).astype(float)  # (..., T, M, K)
    per_slot = slots @ weights[..., None, :, :]  # (..., T, M, N)
    return np.einsum("t,...tmn->...mn", scales, per_slot)


def mac_event_counts(n_lambda: int, n_t: int, osa_enabled: bool = True) -> tuple[int, int]:
    """(slot products, detect events) for one MAC over ``n_lambda`` channels."""
    return (n_t + 1) * n_lambda, 1 if osa_enabled else n_t + 1
