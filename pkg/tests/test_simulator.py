from __future__ import annotations

import random

import numpy as np
import pytest

from mrrsim.device import MrrParams, NoiseParams, ZERO_NOISE, weight_from_voltage
from mrrsim.encoding import quantize
from mrrsim.errors import ConfigError, RangeError, ShapeError
from mrrsim.simulator import (
    MappingMode,
    OpeConfig,
    program_tile,
    reference_layer,
    simulate_layer,
    tile_schedule,
)
from mrrsim.workload import GemmShape

P = MrrParams()
NOISE = NoiseParams(0.02, 0.04, seed=1)
WS, IS, ANALOG = MappingMode.WS, MappingMode.IS, MappingMode.ANALOG


def rand_gemm(rng, m, k, n):
    return rng.uniform(-1, 1, (k, n)), rng.uniform(-1, 1, (m, k))


def test_ope_config_invariants():
    with pytest.raises(ConfigError):
        OpeConfig(cols=9)
    with pytest.raises(ConfigError):
        OpeConfig(rows=0)
    with pytest.raises(ConfigError):
        OpeConfig(t_to=1e-12, t_eo=2e-10)
    assert OpeConfig(4, 8, 8).total_mrrs == 256


def test_program_tile_zero_noise_identity():
    vals = np.random.default_rng(0).uniform(-1, 1, (8, 8))
    got = program_tile(vals, P, ZERO_NOISE, np.random.default_rng(0))
    assert np.max(np.abs(got - vals)) <= 1e-9
    ones = program_tile(np.ones((4, 4)), P, ZERO_NOISE, np.random.default_rng(0))
    assert np.all(ones == 1.0)


def test_program_tile_rejects_out_of_range():
    with pytest.raises(RangeError):
        program_tile(np.array([[1.2]]), P, ZERO_NOISE, np.random.default_rng(0))


def _mc_oracle_std(w: float, draws: int, seed: int) -> float:
    """Independent programming oracle: scalar bisection + Python RNG."""
    lo, hi = P.v_min, P.v_max
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(weight_from_voltage(mid, P)) > w:
            lo = mid
        else:
            hi = mid
    v0 = 0.5 * (lo + hi)
    r = random.Random(seed)
    vals = []
    for _ in range(draws):
        v = min(max(v0 + r.gauss(0, 0.02), P.v_min), P.v_max)
        dT = max(v * v / P.heater_resistance * 1e3 * P.thermal_resistance + r.gauss(0, 0.04), 0.0)
        vt = (dT / (1e3 * P.thermal_resistance) * P.heater_resistance) ** 0.5
        vals.append(float(weight_from_voltage(min(max(vt, P.v_min), P.v_max), P)))
    return float(np.std(vals))


def test_program_tile_noise_std_matches_oracle():
    got = program_tile(np.full(10_000, 0.1), P, NOISE, NOISE.rng(7))
    assert np.std(got) == pytest.approx(_mc_oracle_std(0.1, 10_000, seed=3), rel=0.10)


@pytest.mark.parametrize("mode", [WS, IS, ANALOG])
def test_unit_gemm_zero_noise(mode):
    out = simulate_layer(GemmShape(1, 1, 1), np.array([[0.5]]), np.array([[0.5]]), mode, OpeConfig(), P,
                         ZERO_NOISE, np.random.default_rng(0))
    assert out[0, 0] == pytest.approx(0.25, abs=2.0**-8)


def triple_loop(a, b):
    m, k = a.shape
    n = b.shape[1]
    out = np.zeros((m, n))
    for i in range(m):
        for j in range(n):
            s = 0.0
            for t in range(k):
                s += a[i, t] * b[t, j]
            out[i, j] = s
    return out


def test_reference_matches_triple_loop():
    w, x = rand_gemm(np.random.default_rng(3), 4, 4, 4)
    ref = reference_layer(GemmShape(4, 4, 4), w, x, 7)
    assert np.allclose(ref, triple_loop(quantize(x, 7), quantize(w, 7)), atol=1e-12)


def test_reference_identity_and_zero():
    x = np.random.default_rng(4).uniform(-1, 1, (3, 5))
    assert np.array_equal(reference_layer(GemmShape(3, 5, 5), np.eye(5), x, 7), quantize(x, 7))
    assert np.all(reference_layer(GemmShape(3, 5, 2), np.ones((5, 2)), np.zeros((3, 5)), 7) == 0)


@pytest.mark.parametrize("mode", [WS, IS])
@pytest.mark.parametrize("ope", [OpeConfig(), OpeConfig(2, 4, 3), OpeConfig(1, 1, 1, n_t=3)])
def test_zero_noise_matches_reference(mode, ope):
    rng = np.random.default_rng(5)
    for m, k, n in [(8, 8, 8), (5, 13, 7), (1, 20, 3)]:
        w, x = rand_gemm(rng, m, k, n)
        g = GemmShape(m, k, n)
        out = simulate_layer(g, w, x, mode, ope, P, ZERO_NOISE, rng)
        assert np.max(np.abs(out - reference_layer(g, w, x, ope.n_t))) <= k * 2.0 ** (-ope.n_t - 1)


def test_zero_noise_ws_equals_is():
    rng = np.random.default_rng(6)
    w, x = rand_gemm(rng, 6, 10, 4)
    g = GemmShape(6, 10, 4)
    a = simulate_layer(g, w, x, WS, OpeConfig(), P, ZERO_NOISE, rng)
    b = simulate_layer(g, w, x, IS, OpeConfig(), P, ZERO_NOISE, rng)
    assert np.max(np.abs(a - b)) <= 10 * 2.0**-8


def test_zero_noise_linearity():
    rng = np.random.default_rng(7)
    g = GemmShape(4, 6, 3)
    w = rng.uniform(-1, 1, (6, 3))
    x = rng.integers(-64, 64, (4, 6)) / 64  # on the 1/128 grid, and so is x / 2
    full = simulate_layer(g, w, x, WS, OpeConfig(), P, ZERO_NOISE, rng)
    half = simulate_layer(g, w, x / 2, WS, OpeConfig(), P, ZERO_NOISE, rng)
    assert np.allclose(half, full / 2, atol=1e-9)


def test_analog_zero_noise_is_real_valued_gemm():
    rng = np.random.default_rng(8)
    w, x = rand_gemm(rng, 5, 12, 6)
    out = simulate_layer(GemmShape(5, 12, 6), w, x, ANALOG, OpeConfig(), P, ZERO_NOISE, rng)
    assert np.max(np.abs(out - x @ w)) <= 1e-9


def test_noisy_ws_and_is_differ():
    rng = np.random.default_rng(9)
    g = GemmShape(6, 8, 5)
    w = rng.uniform(-0.2, 0.2, (8, 5))
    x = rng.uniform(-1, 1, (6, 8))
    a = simulate_layer(g, w, x, WS, OpeConfig(), P, NOISE, NOISE.rng(0))
    b = simulate_layer(g, w, x, IS, OpeConfig(), P, NOISE, NOISE.rng(0))
    assert not np.allclose(a, b)


def test_ws_noise_locality():
    # same seed, different inputs: the realized weights (probed with one-hot rows) are identical
    rng = np.random.default_rng(10)
    g = GemmShape(8, 8, 8)
    w = rng.uniform(-1, 1, (8, 8))
    probe = simulate_layer(g, w, np.eye(8) * 0.5, WS, OpeConfig(), P, NOISE, NOISE.rng(2)) * 2
    x = rng.integers(-128, 128, (8, 8)) / 128
    out = simulate_layer(g, w, x, WS, OpeConfig(), P, NOISE, NOISE.rng(2))
    assert np.allclose(out, x @ probe, atol=1e-12)


def test_seed_determinism():
    rng = np.random.default_rng(11)
    w, x = rand_gemm(rng, 4, 9, 4)
    g = GemmShape(4, 9, 4)
    for mode in (WS, IS, ANALOG):
        a = simulate_layer(g, w, x, mode, OpeConfig(), P, NOISE, NOISE.rng(5))
        b = simulate_layer(g, w, x, mode, OpeConfig(), P, NOISE, NOISE.rng(5))
        assert np.array_equal(a, b)


def test_batched_entries_are_independent_runs():
    rng = np.random.default_rng(12)
    w, x = rand_gemm(rng, 3, 8, 2)
    g = GemmShape(3, 8, 2)
    both = simulate_layer(g, w, np.stack([x, x]), WS, OpeConfig(), P, NOISE, NOISE.rng(0))
    assert both.shape == (2, 3, 2)
    assert not np.array_equal(both[0], both[1])
    clean = simulate_layer(g, w, np.stack([x, x]), WS, OpeConfig(), P, ZERO_NOISE, NOISE.rng(0))
    assert np.array_equal(clean[0], clean[1])


def test_tile_schedule_order():
    tiles = list(tile_schedule(GemmShape(1, 10, 5), OpeConfig(1, 2, 4), WS))
    assert tiles[:3] == [(0, 4, 0, 2), (4, 8, 0, 2), (8, 10, 0, 2)]
    assert len(tiles) == 3 * 3


def test_operand_validation():
    g = GemmShape(2, 3, 4)
    with pytest.raises(ShapeError):
        simulate_layer(g, np.zeros((4, 3)), np.zeros((2, 3)), WS, OpeConfig(), P, ZERO_NOISE, np.random.default_rng())
    with pytest.raises(RangeError):
        simulate_layer(g, np.full((3, 4), 2.0), np.zeros((2, 3)), WS, OpeConfig(), P, ZERO_NOISE,
                       np.random.default_rng())
