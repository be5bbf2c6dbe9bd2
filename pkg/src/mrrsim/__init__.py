"""Behavioral, energy and mapping simulator for microring-resonator optical accelerators."""

from __future__ import annotations

__version__ = "0.1.0"

from .cost import EnergyTable, EventCounts, LayerCost, layer_edp, layer_event_counts, network_edp
from .device import (
    MrrParams,
    NoiseParams,
    ZERO_NOISE,
    delta_temperature,
    device_curve,
    differential_transmission,
    drop_transmission,
    noisy_weight,
    resonance_shift,
    tuning_figures,
    voltage_from_weight,
    weight_from_voltage,
)
from .dse import DseConstraints, DseResult, select_config
from .encoding import DigitStream, decode_value, encode_signed_digits, osa_mac
from .errors import MrrSimError
from .inference import accuracy_eval, layer_degradation_profile, load_toy_model, make_eval_set, run_inference
from .mapper import LayerProfile, MapperParams, MappingDecision, select_mappings
from .simulator import MappingMode, OpeConfig, reference_layer, simulate_layer
from .workload import GemmShape, LayerSpec, NetworkSpec, builtin_workloads, conv_to_gemm, load_network

__all__ = [name for name in dir() if not name.startswith("_")]
