"""Array-size exploration: enumerate (T, R, C) and minimize a robust EDP score."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .cost import EnergyTable, layer_edp
from .errors import ConfigError, DomainError
from .simulator import MappingMode, OpeConfig
from .workload import NetworkSpec

POW2 = (1, 2, 4, 8, 16, 32, 64, 128)


@dataclass(frozen=True)
class DseConstraints:
    c_max: int = 8
    total_mrr_max: int = 1024
    t_values: tuple[int, ...] = POW2
    r_values: tuple[int, ...] = POW2
    c_values: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8)

    def __post_init__(self) -> None:
        if self.c_max < 1 or self.total_mrr_max < 1:
            raise ConfigError("c_max and total_mrr_max must be >= 1")
        if not (self.t_values and self.r_values and self.c_values):
            raise ConfigError("candidate ranges must be nonempty")
        if min(*self.t_values, *self.r_values, *self.c_values) < 1:
            raise ConfigError("candidate dimensions must be >= 1")


@dataclass(frozen=True)
class DseRow:
    tiles: int
    rows: int
    cols: int
    edps: dict[str, float]
    g: float
    w_max: float
    m: float

    @property
    def size(self) -> int:
        return self.tiles * self.rows * self.cols


@dataclass
class DseResult:
    rows: list[DseRow]
    chosen: DseRow
    networks: list[str] = field(default_factory=list)
    lam: float = 0.5

    def to_csv(self, fmt=lambda x: f"{x:.12g}") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["T", "R", "C", *(f"EDP_{n}" for n in self.networks), "G", "W_max", "M"])
        for r in self.rows:
            w.writerow([r.tiles, r.rows, r.cols, *(fmt(r.edps[n]) for n in self.networks),
                        fmt(r.g), fmt(r.w_max), fmt(r.m)])
        return buf.getvalue()


def enumerate_configs(cons: DseConstraints, base: OpeConfig | None = None) -> list[OpeConfig]:
    """All admissible configurations in lexicographic (T, R, C) order."""
    base = base or OpeConfig()
    out = []
    for t in sorted(set(cons.t_values)):
        for r in sorted(set(cons.r_values)):
            for c in sorted(set(cons.c_values)):
                if c <= cons.c_max and t * r * c <= cons.total_mrr_max:
                    out.append(replace(base, tiles=t, rows=r, cols=c))
    if not out:
        raise ConfigError("no configuration satisfies the constraints")
    return out


def aggregate_metric(edps: Sequence[float], lam: float) -> tuple[float, float, float]:
    """(geometric mean G, worst case W_max, blended M = (1-lam) G + lam W_max)."""
    if not edps:
        raise DomainError("need at least one EDP value")
    if any(not e > 0 for e in edps):
        raise DomainError("EDP values must be positive")
    if not 0 <= lam <= 1:
        raise DomainError("lambda must lie in [0, 1]")
    g = math.exp(math.fsum(math.log(e) for e in edps) / len(edps))
    w_max = max(edps)
    return g, w_max, (1 - lam) * g + lam * w_max


def tie_key(row: DseRow) -> tuple:
    return (row.m, row.size, row.cols, row.rows)


def select_config(
    networks: Sequence[NetworkSpec],
    cons: DseConstraints | None = None,
    lam: float = 0.5,
    table: EnergyTable | None = None,
    mode: MappingMode = MappingMode.WS,
    base: OpeConfig | None = None,
) -> DseResult:
    """Evaluate every admissible configuration and return the argmin of M.

    Ties in M go to the smallest T*R*C, then the fewest columns, then the
    fewest rows.
    """
    if not networks:
        raise ConfigError("need at least one network")
    if not 0 <= lam <= 1:
        raise DomainError("lambda must lie in [0, 1]")
    cons = cons or DseConstraints()
    table = table or EnergyTable()
    gemms = {net.name: net.gemms() for net in networks}
    rows = []
    for ope in enumerate_configs(cons, base):
        edps = {name: sum(layer_edp(g, ope, mode, table).edp for g in gs) for name, gs in gemms.items()}
        g, w_max, m = aggregate_metric(list(edps.values()), lam)
        rows.append(DseRow(ope.tiles, ope.rows, ope.cols, edps, g, w_max, m))
    chosen = min(rows, key=tie_key)
    return DseResult(rows, chosen, list(gemms), lam)
