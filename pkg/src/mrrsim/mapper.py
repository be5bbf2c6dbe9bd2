"""Per-layer choice between input- and weight-stationary mapping.

Each layer is scored under both mappings by a weighted geometric blend of its
accuracy-degradation ratio and EDP ratio, each normalized by the better of the
two mappings. The accuracy weight grows with the layer's best-case degradation.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

from .errors import DomainError
from .simulator import MappingMode

D_FLOOR = 1e-6  # percentage points
E_FLOOR = 1e-300


@dataclass(frozen=True)
class MapperParams:
    alpha_min: float = 0.01
    gamma: float = 0.1
    d_tol: float = 1.0

    def __post_init__(self) -> None:
        if self.d_tol <= 0:
            raise DomainError("d_tol must be positive")


@dataclass(frozen=True)
class LayerProfile:
    """Degradations in percentage points, EDPs in J*s."""

    name: str
    d_is: float
    d_ws: float
    e_is: float
    e_ws: float

    def __post_init__(self) -> None:
        if min(self.d_is, self.d_ws, self.e_is, self.e_ws) < 0:
            raise DomainError(f"layer {self.name!r}: profile values must be non-negative")


@dataclass(frozen=True)
class LayerDecision:
    name: str
    chosen: MappingMode
    alpha: float
    m_is: float
    m_ws: float
    d_is: float
    d_ws: float
    e_is: float
    e_ws: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["chosen"] = self.chosen.value
        return d


@dataclass(frozen=True)
class MappingDecision:
    layers: tuple[LayerDecision, ...]

    @property
    def modes(self) -> list[MappingMode]:
        return [l.chosen for l in self.layers]

    def total_edp(self) -> float:
        return math.fsum(l.e_is if l.chosen is MappingMode.IS else l.e_ws for l in self.layers)

    def to_dict(self) -> dict:
        return {"layers": [l.to_dict() for l in self.layers]}


def layer_alpha(d_ref: float, params: MapperParams = MapperParams()) -> float:
    """Accuracy weight ``alpha_min + gamma * ln(1 + d_ref / d_tol)``, capped at 1."""
    if d_ref < 0:
        raise DomainError("d_ref must be non-negative")
    return min(1.0, params.alpha_min + params.gamma * math.log1p(d_ref / params.d_tol))


def mapping_metric(p: LayerProfile, params: MapperParams = MapperParams()) -> tuple[float, float, MappingMode]:
    """(M_is, M_ws, chosen). Equal scores go to WS."""
    alpha = layer_alpha(min(p.d_is, p.d_ws), params)
    d_is, d_ws = max(p.d_is, D_FLOOR), max(p.d_ws, D_FLOOR)
    e_is, e_ws = max(p.e_is, E_FLOOR), max(p.e_ws, E_FLOOR)
    d_ref, e_ref = min(d_is, d_ws), min(e_is, e_ws)

    def score(d: float, e: float) -> float:
        return (d / d_ref) ** alpha * (e / e_ref) ** (1 - alpha)

    m_is, m_ws = score(d_is, e_is), score(d_ws, e_ws)
    return m_is, m_ws, MappingMode.IS if m_is < m_ws else MappingMode.WS


def select_mappings(profiles: Sequence[LayerProfile], params: MapperParams = MapperParams()) -> MappingDecision:
    if not profiles:
        raise DomainError("need at least one layer profile")
    out = []
    for p in profiles:
        m_is, m_ws, chosen = mapping_metric(p, params)
        alpha = layer_alpha(min(p.d_is, p.d_ws), params)
        out.append(LayerDecision(p.name, chosen, alpha, m_is, m_ws, p.d_is, p.d_ws, p.e_is, p.e_ws))
    return MappingDecision(tuple(out))
