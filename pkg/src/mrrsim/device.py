"""Thermo-optic microring model: voltage -> heating -> resonance shift -> weight.

All functions accept scalars or numpy arrays and broadcast elementwise.
Wavelengths are in nm, resistances in ohm, thermal resistance in K/mW.
"""

from __future__ import annotations

import functools
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike

from ._jsonio import from_mapping, read_json
from .errors import CalibrationError, DomainError, RangeError

# V^2 / R_h is a power in W; thermal resistance is quoted per mW.
_W_TO_MW = 1e3


@dataclass(frozen=True)
class MrrParams:
    """Physical constants of one thermally tuned add-drop microring."""

    lambda0: float = 1538.74
    lambda_ref: float = 1538.26
    attenuation_a: float = 0.925  # stored, not used by the Lorentzian
    n0: float = 2.4
    gamma: float = 0.7534
    heater_resistance: float = 50.0
    thermal_resistance: float = 2.0
    thermo_optic_coeff: float = 1.86e-4
    v_min: float = 1.0
    v_max: float = 3.0
    q_min: float = -1.0
    q_max: float = 1.0

    def __post_init__(self) -> None:
        if not self.lambda0 > self.lambda_ref > 0:
            raise RangeError("require lambda0 > lambda_ref > 0")
        if not self.gamma > 0:
            raise RangeError("gamma must be positive")
        if not 0 < self.attenuation_a <= 1:
            raise RangeError("attenuation_a must lie in (0, 1]")
        if self.heater_resistance <= 0 or self.thermal_resistance <= 0:
            raise RangeError("heater and thermal resistance must be positive")
        if self.thermo_optic_coeff <= 0 or self.n0 <= 0:
            raise RangeError("thermo_optic_coeff and n0 must be positive")
        if not self.v_min < self.v_max:
            raise RangeError("require v_min < v_max")
        if self.v_min < 0:
            raise RangeError("v_min must be non-negative")
        if not self.q_min < self.q_max:
            raise RangeError("require q_min < q_max")

    @property
    def q_rng(self) -> float:
        return self.q_max - self.q_min

    @classmethod
    def from_dict(cls, data: dict) -> "MrrParams":
        return from_mapping(cls, data, "MrrParams")

    @classmethod
    def from_json(cls, path: str | Path) -> "MrrParams":
        return cls.from_dict(read_json(path))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class NoiseParams:
    """Additive Gaussian perturbations: DAC voltage (V) and heater temperature (K)."""

    sigma_dac: float = 0.02
    sigma_th: float = 0.04
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sigma_dac < 0 or self.sigma_th < 0:
            raise RangeError("noise standard deviations must be non-negative")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise RangeError("seed must be an unsigned 64-bit integer")

    @property
    def is_zero(self) -> bool:
        return self.sigma_dac == 0 and self.sigma_th == 0

    def rng(self, *stream: int) -> np.random.Generator:
        """Generator for the stream identified by ``(seed, *stream)``."""
        return np.random.default_rng([int(self.seed), *stream])

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseParams":
        return from_mapping(cls, data, "NoiseParams")

    @classmethod
    def from_json(cls, path: str | Path) -> "NoiseParams":
        return cls.from_dict(read_json(path))

    def to_dict(self) -> dict:
        return asdict(self)


ZERO_NOISE = NoiseParams(0.0, 0.0, 0)


def delta_temperature(v: ArrayLike, p: MrrParams) -> np.ndarray | float:
    """Heater temperature rise in K for drive voltage ``v``."""
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise DomainError("heater voltage must be non-negative")
    return _scalar(v * v / p.heater_resistance * _W_TO_MW * p.thermal_resistance)


def resonance_shift(dT: ArrayLike, p: MrrParams) -> np.ndarray | float:
    """Red shift of the resonance (nm) for a temperature rise ``dT``."""
    dT = np.asarray(dT, dtype=float)
    if np.any(dT < 0):
        raise DomainError("temperature rise must be non-negative")
    return _scalar(_shift(dT, p))


def drop_transmission(detuning: ArrayLike, p: MrrParams) -> np.ndarray | float:
    """Lorentzian drop-port transmission at a detuning (nm) from resonance."""
    d = np.asarray(detuning, dtype=float)
    g2 = p.gamma * p.gamma
    return _scalar(g2 / (d * d + g2))


def differential_transmission(v: ArrayLike, p: MrrParams) -> np.ndarray | float:
    """Drop-minus-through transmission at the probe wavelength, in [-1, 1]."""
    v = _check_voltage(v, p)
    return _scalar(_tdiff_from_dt(_dt(v, p), p))


def weight_from_voltage(v: ArrayLike, p: MrrParams) -> np.ndarray | float:
    """Normalized weight realized by drive voltage ``v``.

    ``v_min`` maps to ``q_max`` and ``v_max`` to ``q_min``; the map is strictly
    decreasing in between.
    """
    v = _check_voltage(v, p)
    return _scalar(_weight_from_dt(_dt(v, p), p))


def voltage_from_weight(w: ArrayLike, p: MrrParams, tol: float = 1e-9) -> np.ndarray | float:
    """Drive voltage realizing weight ``w`` (inverse of :func:`weight_from_voltage`).

    Vectorized bisection on the monotone voltage-to-weight map, run until the
    voltage bracket collapses to floating-point resolution. Raises
    :class:`CalibrationError` if the result misses ``w`` by more than ``tol``.
    """
    w = np.asarray(w, dtype=float)
    if np.any((w < p.q_min) | (w > p.q_max)) or np.any(np.isnan(w)):
        raise RangeError(f"weight outside [{p.q_min}, {p.q_max}]")
    # narrow starting bracket around the closed-form inverse; any element whose
    # bracket does not straddle the target falls back to the full range
    guess = _voltage_guess(w, p)
    half = 1e-9 * np.maximum(guess, 1.0)
    lo = np.clip(guess - half, p.v_min, p.v_max)  # weight(lo) >= w
    hi = np.clip(guess + half, p.v_min, p.v_max)  # weight(hi) <= w
    valid = (_weight_from_dt(_dt(lo, p), p) >= w) & (_weight_from_dt(_dt(hi, p), p) <= w)
    lo = np.where(valid, lo, p.v_min)
    hi = np.where(valid, hi, p.v_max)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        wm = _weight_from_dt(_dt(mid, p), p)
        above = wm > w
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        if np.all(hi - lo <= 2 * np.spacing(hi)):
            break
    # pick whichever bracket end lands closer in weight space
    w_lo = _weight_from_dt(_dt(lo, p), p)
    w_hi = _weight_from_dt(_dt(hi, p), p)
    take_lo = np.abs(w_lo - w) <= np.abs(w_hi - w)
    v = np.where(take_lo, lo, hi)
    miss = np.abs(np.where(take_lo, w_lo, w_hi) - w)
    # endpoints are exact by construction of the normalization
    v = np.where(w == p.q_max, p.v_min, np.where(w == p.q_min, p.v_max, v))
    miss = np.where((w == p.q_max) | (w == p.q_min), 0.0, miss)
    if np.any(miss > tol):
        raise CalibrationError("bisection failed to reach the weight tolerance")
    return _scalar(v)


def noisy_weight(
    v: ArrayLike, p: MrrParams, n: NoiseParams, rng: np.random.Generator
) -> np.ndarray | float:
    """Weight realized at voltage ``v`` under DAC and thermal perturbations.

    Draws one DAC sample per element, then one thermal sample per element, so
    the stream consumption depends only on the shape of ``v``.
    """
    v = _check_voltage(v, p)
    eps_dac = rng.standard_normal(v.shape) * n.sigma_dac
    eps_th = rng.standard_normal(v.shape) * n.sigma_th
    v_noisy = np.clip(v + eps_dac, p.v_min, p.v_max)
    dT = np.maximum(_dt(v_noisy, p) + eps_th, 0.0)
    return _scalar(_weight_from_dt(dT, p))


def tuning_figures(p: MrrParams) -> tuple[float, float]:
    """Thermal tuning efficiency (nm/mW) and average static locking power (mW).

    The efficiency is the small-signal slope of the resonance shift against
    heater power, using ``n0`` for the effective index. The locking power
    assumes an average excursion of half the HWHM.
    """
    efficiency = p.lambda0 * p.thermo_optic_coeff / p.n0 * p.thermal_resistance
    return efficiency, 0.5 * p.gamma / efficiency


def device_curve(p: MrrParams, points: int = 256) -> dict[str, np.ndarray]:
    """Sweep of the full chain over ``[v_min, v_max]``."""
    v = np.linspace(p.v_min, p.v_max, points)
    dT = _dt(v, p)
    return {
        "V": v,
        "dT": dT,
        "dlambda": _shift(dT, p),
        "T_diff": _tdiff_from_dt(dT, p),
        "w": _weight_from_dt(dT, p),
    }


def _scalar(x: np.ndarray) -> np.ndarray | float:
    return float(x) if np.ndim(x) == 0 else x


def _check_voltage(v: ArrayLike, p: MrrParams) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if np.any((v < p.v_min) | (v > p.v_max)) or np.any(np.isnan(v)):
        raise RangeError(f"voltage outside [{p.v_min}, {p.v_max}] V")
    return v


def _dt(v: np.ndarray, p: MrrParams) -> np.ndarray:
    return v * v / p.heater_resistance * _W_TO_MW * p.thermal_resistance


def _shift(dT: np.ndarray, p: MrrParams) -> np.ndarray:
    bdt = p.thermo_optic_coeff * dT
    return p.lambda0 * bdt / (p.n0 + bdt)


def _tdiff_from_dt(dT: np.ndarray, p: MrrParams) -> np.ndarray:
    d = p.lambda0 + _shift(dT, p) - p.lambda_ref
    g2 = p.gamma * p.gamma
    t_drop = g2 / (d * d + g2)
    return 2.0 * t_drop - 1.0


@functools.lru_cache(maxsize=64)
def _calibration(p: MrrParams) -> tuple[float, float]:
    t_hi = float(_tdiff_from_dt(_dt(np.float64(p.v_min), p), p))
    t_lo = float(_tdiff_from_dt(_dt(np.float64(p.v_max), p), p))
    if t_hi == t_lo:
        raise CalibrationError("T_diff(v_min) == T_diff(v_max); weight range is degenerate")
    return t_hi, t_lo


def _voltage_guess(w: np.ndarray, p: MrrParams) -> np.ndarray:
    """Closed-form inverse of the chain; only used to seed the bisection."""
    t_hi, t_lo = _calibration(p)
    t_diff = t_lo + (w - p.q_min) / p.q_rng * (t_hi - t_lo)
    t_drop = np.clip(0.5 * (t_diff + 1.0), 1e-300, 1.0)
    detuning = p.gamma * np.sqrt(1.0 / t_drop - 1.0)
    shift = np.clip(detuning - (p.lambda0 - p.lambda_ref), 0.0, 0.999 * p.lambda0)
    dT = p.n0 * shift / (p.thermo_optic_coeff * (p.lambda0 - shift))
    v = np.sqrt(dT * p.heater_resistance / (_W_TO_MW * p.thermal_resistance))
    return np.clip(v, p.v_min, p.v_max)


def _weight_from_dt(dT: np.ndarray, p: MrrParams) -> np.ndarray:
    t_hi, t_lo = _calibration(p)
    return p.q_min + p.q_rng * (_tdiff_from_dt(dT, p) - t_lo) / (t_hi - t_lo)
