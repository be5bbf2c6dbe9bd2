"""Event-count energy / delay / EDP model for the mixed digital-analog array.

Counts are derived from the tile schedule of :mod:`mrrsim.simulator`; each
event class is priced from an :class:`EnergyTable` in SI units.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from math import ceil
from pathlib import Path

from ._jsonio import from_mapping, read_json
from .errors import RangeError, UnsupportedModeError
from .simulator import MappingMode, OpeConfig, stationary_extent
from .workload import GemmShape, NetworkSpec


@dataclass(frozen=True)
class EnergyTable:
    """Per-component power (W) and energy (J) figures."""

    laser_static: float = 1.38e-3  # per tile laser
    mrr_to_static: float = 1.58e-3  # per weighting MRR, thermal locking
    mrr_eo_dynamic: float = 6.3e-15  # per modulated digit
    dac_dynamic: float = 5.2e-12  # per DAC bit written
    pd_tia_dynamic: float = 440e-15  # per detection
    sram_leak: float = 48.1e-12  # per buffered bit
    sram_dynamic: float = 50e-15  # per bit read or written
    # not a published figure; overridable
    adc_dynamic: float = 2.55e-12  # per 8-bit conversion
    dac_bits: int = 8
    adc_bits: int = 8
    acc_bits: int = 24

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name.endswith("_bits"):
                if int(value) != value or value < 1:
                    raise RangeError(f"{f.name} must be an integer >= 1")
            elif value < 0:
                raise RangeError(f"{f.name} must be non-negative")

    @classmethod
    def from_dict(cls, data: dict) -> "EnergyTable":
        return from_mapping(cls, data, "EnergyTable")

    @classmethod
    def from_json(cls, path: str | Path) -> "EnergyTable":
        return cls.from_dict(read_json(path))

    def to_dict(self) -> dict:
        return asdict(self)

    def scaled_dynamic(self, factor: float) -> "EnergyTable":
        d = self.to_dict()
        for key in ("mrr_eo_dynamic", "dac_dynamic", "pd_tia_dynamic", "sram_dynamic", "adc_dynamic"):
            d[key] *= factor
        return EnergyTable(**d)


@dataclass(frozen=True)
class EventCounts:
    reprogram_events: int = 0
    mrr_writes: int = 0
    eo_slot_bits: int = 0
    dac_bits_total: int = 0
    pd_events: int = 0
    adc_events: int = 0
    sram_read_bits: int = 0
    sram_write_bits: int = 0
    compute_cycles: int = 0
    # static-power bookkeeping
    active_mrrs: int = 0
    lasers: int = 0
    buffer_bits: int = 0

    def __post_init__(self) -> None:
        if any(getattr(self, f.name) < 0 for f in fields(self)):
            raise RangeError("event counts must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)


COMPONENTS = ("laser", "mrr_static", "mrr_eo", "dac", "pd_tia", "adc", "sram_dynamic", "sram_leak")


@dataclass(frozen=True)
class LayerCost:
    energy_j: float
    delay_s: float
    edp: float
    breakdown: dict[str, float]
    counts: EventCounts


def layer_event_counts(
    layer: GemmShape, ope: OpeConfig, mode: MappingMode, t: EnergyTable | None = None
) -> EventCounts:
    """Tally the events of one layer executed under ``mode``.

    WS keeps an ``N``-chunk of weights on the array and streams the ``M`` input
    vectors; IS swaps the roles. Without OSA every digit slot is detected and
    converted separately, and its partial sum goes through the buffer.
    """
    t = t or EnergyTable()
    mode = MappingMode(mode)
    if mode is MappingMode.ANALOG:
        raise UnsupportedModeError("cost model covers WS and IS mappings only")
    s_dim, streamed = stationary_extent(layer, mode)
    slots = ope.n_t + 1
    k_tiles = ceil(layer.k / ope.cols)
    n_w = k_tiles * ceil(s_dim / ope.parallel_rows)
    mrr_writes = n_w * ope.total_mrrs
    osa_factor = 1 if ope.osa_enabled else slots
    pd_events = n_w * streamed * ope.parallel_rows * osa_factor
    outputs = layer.m * layer.n
    psum_bits = 2 * t.acc_bits * outputs * (k_tiles - 1) * osa_factor
    return EventCounts(
        reprogram_events=n_w,
        mrr_writes=mrr_writes,
        eo_slot_bits=k_tiles * streamed * ope.cols * slots,
        dac_bits_total=mrr_writes * t.dac_bits,
        pd_events=pd_events,
        adc_events=pd_events,
        sram_read_bits=psum_bits // 2,
        sram_write_bits=psum_bits // 2 + t.acc_bits * outputs,
        compute_cycles=n_w * streamed * slots,
        active_mrrs=ope.total_mrrs,
        lasers=ope.tiles,
        buffer_bits=ope.total_mrrs * t.dac_bits + streamed * ope.parallel_rows * t.acc_bits,
    )


def energy_breakdown(c: EventCounts, t: EnergyTable, delay_s: float) -> dict[str, float]:
    """Component energies in J; the ``"total"`` entry is their sum."""
    if delay_s < 0:
        raise RangeError("delay must be non-negative")
    parts = {
        "laser": t.laser_static * c.lasers * delay_s,
        "mrr_static": t.mrr_to_static * c.active_mrrs * delay_s,
        "mrr_eo": t.mrr_eo_dynamic * c.eo_slot_bits,
        "dac": t.dac_dynamic * c.dac_bits_total,
        "pd_tia": t.pd_tia_dynamic * c.pd_events,
        "adc": t.adc_dynamic * c.adc_events,
        "sram_dynamic": t.sram_dynamic * (c.sram_read_bits + c.sram_write_bits),
        "sram_leak": t.sram_leak * c.buffer_bits * delay_s,
    }
    parts["total"] = sum(parts[k] for k in COMPONENTS)
    return parts


def layer_delay(c: EventCounts, ope: OpeConfig) -> float:
    """Compute slots at the clock plus serialized thermo-optic reprogramming."""
    return c.compute_cycles / ope.clock_hz + c.reprogram_events * ope.t_to


def layer_edp(
    layer: GemmShape, ope: OpeConfig, mode: MappingMode, t: EnergyTable | None = None
) -> LayerCost:
    t = t or EnergyTable()
    counts = layer_event_counts(layer, ope, mode, t)
    delay = layer_delay(counts, ope)
    parts = energy_breakdown(counts, t, delay)
    energy = parts.pop("total")
    return LayerCost(energy, delay, energy * delay, parts, counts)


def network_edp(
    net: NetworkSpec, ope: OpeConfig, mode: MappingMode | list[MappingMode], t: EnergyTable | None = None
) -> float:
    """Sum of per-layer EDPs; ``mode`` may be one mode or one per layer."""
    gemms = net.gemms()
    modes = mode if isinstance(mode, (list, tuple)) else [mode] * len(gemms)
    return sum(layer_edp(g, ope, m, t).edp for g, m in zip(gemms, modes, strict=True))
