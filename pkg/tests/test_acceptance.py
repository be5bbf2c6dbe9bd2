"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are written past
pytest's capture) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import math
import random
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from mrrsim.cli import cmd_dispatch
from mrrsim.cost import layer_edp, layer_event_counts
from mrrsim.device import MrrParams, NoiseParams, ZERO_NOISE, tuning_figures, weight_from_voltage
from mrrsim.dse import DseConstraints, enumerate_configs, select_config
from mrrsim.encoding import decode_digits, decode_value, encode_digits, encode_signed_digits, osa_mac
from mrrsim.inference import accuracy_eval, load_toy_model, make_eval_set, run_inference
from mrrsim.mapper import LayerProfile, layer_alpha, select_mappings
from mrrsim.simulator import MappingMode, OpeConfig, reference_layer, simulate_layer
from mrrsim.workload import CNN_NAMES, GemmShape, builtin_path, builtin_workloads

P = MrrParams()
WS, IS, ANALOG = MappingMode.WS, MappingMode.IS, MappingMode.ANALOG


@pytest.fixture
def verdict(request):
    """Print one result line per criterion, bypassing output capture."""
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def emit(number: str, ok: bool, text: str) -> None:
        line = f"[acceptance {number:>3}] {'PASS' if ok else 'FAIL'}  {text}"
        if capman is not None:
            with capman.global_and_fixture_disabled():
                print("\n" + line, flush=True)
        else:
            print(line, flush=True)
        assert ok, line

    return emit


def _timed(fn, repeat: int = 1):
    best, value = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t0)
    return value, best


def test_c01_tuning_efficiency(verdict):
    (eff, _), dt = _timed(lambda: tuning_figures(P), repeat=50)
    err = abs(eff - 0.238) / 0.238
    verdict("1", err <= 5e-3 and dt < 1e-3, f"efficiency {eff:.6f} nm/mW, rel err {err:.2%}, {dt * 1e6:.1f} us")


def test_c02_static_power(verdict):
    (_, power), dt = _timed(lambda: tuning_figures(P), repeat=50)
    err = abs(power - 1.58) / 1.58
    verdict("2", err <= 1e-2 and dt < 1e-3, f"static power {power:.6f} mW, rel err {err:.2%}, {dt * 1e6:.1f} us")


def test_c03_transfer_endpoints(verdict):
    lo, hi = weight_from_voltage(P.v_min, P), weight_from_voltage(P.v_max, P)
    w = weight_from_voltage(np.linspace(P.v_min, P.v_max, 1000), P)
    mono = bool(np.all(np.diff(w) < 0))
    ok = lo == P.q_max and hi == P.q_min and mono
    verdict("3", ok, f"w(v_min)={lo!r}, w(v_max)={hi!r}, strictly decreasing on 1000 points: {mono}")


def test_c04_osa_mac_equivalence(verdict):
    def check():
        rng = random.Random(4)
        worst = 0.0
        for _ in range(10_000):
            n_l, n_t = rng.randint(1, 8), rng.randint(0, 7)
            w = [rng.uniform(-1, 1) for _ in range(n_l)]
            xs = [encode_signed_digits(rng.uniform(-0.999999, 0.999999), n_t) for _ in range(n_l)]
            direct = sum(a * decode_value(s) for a, s in zip(w, xs))
            worst = max(worst, abs(osa_mac(w, xs) - direct))
        return worst

    worst, dt = _timed(check)
    verdict("4", worst <= 1e-12 and dt < 5.0, f"max |osa - direct| = {worst:.3g} over 1e4 instances, {dt:.2f} s")


def test_c05_encoding_round_trip(verdict):
    def check():
        x = np.random.default_rng(5).uniform(-1, 1, 10_000)
        return max(
            float(np.max(np.abs(decode_digits(encode_digits(x, n_t), n_t) - x)) - 2.0 ** (-n_t - 1))
            for n_t in range(0, 8)
        )

    excess, dt = _timed(check)
    verdict("5", excess <= 1e-12 and dt < 1.0,
            f"max error minus 2^-(N_T+1) = {excess:.3g} for N_T in 0..7, {dt * 1e3:.0f} ms")


def test_c06_conversion_identity(verdict):
    configs = enumerate_configs(DseConstraints())
    sample = random.Random(6).sample(configs, 20)
    checked, bad = 0, 0
    for net in builtin_workloads():
        for g in net.gemms():
            for ope in sample:
                for mode in (WS, IS):
                    on = layer_event_counts(g, ope, mode)
                    off = layer_event_counts(g, OpeConfig(**{**ope.to_dict(), "osa_enabled": False}), mode)
                    checked += 1
                    bad += off.adc_events != (ope.n_t + 1) * on.adc_events
    verdict("6", bad == 0, f"{checked} layer/config/mode cases, {bad} violations")


def test_c07_osa_edp_direction(verdict):
    nets = {n.name: n for n in builtin_workloads()}
    on, off = OpeConfig(n_t=7), OpeConfig(n_t=7, osa_enabled=False)
    layers, violations, tot_on, tot_off = 0, 0, 0.0, 0.0
    for name in CNN_NAMES:
        for g in nets[name].gemms():
            for mode in (WS, IS):
                a, b = layer_edp(g, on, mode).edp, layer_edp(g, off, mode).edp
                layers += 1
                violations += not a < b
                if mode is WS:
                    tot_on, tot_off = tot_on + a, tot_off + b
    reduction = 1 - tot_on / tot_off
    verdict("7", violations == 0,
            f"{layers} layer/mode cases, {violations} violations; aggregate WS EDP reduction {reduction:.2%} (reported only)")


def _brute_force(nets, cons, lam):
    best = None
    for t, r, c in itertools.product(cons.t_values, cons.r_values, range(1, 9)):
        if c > cons.c_max or t * r * c > cons.total_mrr_max:
            continue
        ope = OpeConfig(t, r, c)
        edps = [math.fsum(layer_edp(g, ope, WS).edp for g in n.gemms()) for n in nets]
        g = math.prod(edps) ** (1 / len(edps))
        key = ((1 - lam) * g + lam * max(edps), t * r * c, c, r)
        if best is None or key < best[0]:
            best = (key, (t, r, c))
    return best[1]


def test_c08_dse_argmin(verdict):
    nets = builtin_workloads()
    cons = DseConstraints()
    res, dt = _timed(lambda: select_config(nets, cons, 0.5))
    got = (res.chosen.tiles, res.chosen.rows, res.chosen.cols)
    oracle = _brute_force(nets, cons, 0.5)
    feasible = all(r.cols <= 8 and r.size <= 1024 for r in res.rows)
    ok = got == oracle and feasible and dt < 60
    verdict("8", ok, f"chosen (T,R,C)={got}, brute force {oracle}, {len(res.rows)} configs feasible={feasible}, "
                     f"{dt:.1f} s; reference winner R=8,C=8 reported only")


def _random_profiles(rng: random.Random, count: int) -> list[LayerProfile]:
    out = []
    for i in range(count):
        d_is, d_ws = rng.uniform(0, 10), rng.uniform(0, 10)
        e_is, e_ws = 10 ** rng.uniform(-10, -3), 10 ** rng.uniform(-10, -3)
        out.append(LayerProfile(f"l{i}", d_is, d_ws, e_is, e_ws))
    return out


def test_c09a_mapper_choice_and_alpha(verdict):
    profiles = _random_profiles(random.Random(9), 1000)
    dec = select_mappings(profiles)
    per_layer = all((l.m_is if l.chosen is IS else l.m_ws) <= (l.m_ws if l.chosen is IS else l.m_is)
                    for l in dec.layers)
    dominance_cases, dominance_ok = 0, True
    for p, l in zip(profiles, dec.layers):
        if p.d_is <= p.d_ws and p.e_is <= p.e_ws:
            dominance_cases += 1
            dominance_ok &= l.chosen is IS
        elif p.d_ws <= p.d_is and p.e_ws <= p.e_is:
            dominance_cases += 1
            dominance_ok &= l.chosen is WS
    alpha_err = abs(layer_alpha(1.0) - (0.01 + 0.1 * math.log(2)))
    ok = per_layer and dominance_ok and alpha_err <= 1e-12
    verdict("9a", ok, f"per-layer M(chosen)<=M(alt): {per_layer}; dominance on {dominance_cases}/1000 "
                      f"dominated profiles: {dominance_ok}; |alpha(1)-closed form| = {alpha_err:.2g}")


def test_c09b_hybrid_edp_vs_all_is(verdict):
    # literal statement: hybrid total EDP <= all-IS total EDP on any profile set
    rng = random.Random(90)
    sets, failures, example = 1000, 0, None
    for _ in range(sets):
        ps = _random_profiles(rng, 6)
        dec = select_mappings(ps)
        all_is = math.fsum(p.e_is for p in ps)
        if dec.total_edp() > all_is:
            failures += 1
            example = example or next(l for l in dec.layers if l.chosen is WS and l.e_ws > l.e_is)
    detail = "" if example is None else (
        f"; e.g. layer d_is={example.d_is:.3g} d_ws={example.d_ws:.3g} e_is={example.e_is:.3g} "
        f"e_ws={example.e_ws:.3g} picks WS")
    verdict("9b", failures == 0, f"hybrid EDP > all-IS EDP in {failures}/{sets} random profile sets{detail}")


def test_c10_robustness_ordering(verdict):
    def check():
        model = load_toy_model()
        ev = make_eval_set(model, 0, 512)
        ref = accuracy_eval(model, ev)
        zero = {m: run_inference(model, ev, m, noise=ZERO_NOISE) for m in (WS, IS, ANALOG)}
        noise = NoiseParams(0.02, 0.04, seed=0)
        mean = {m: float(np.mean([run_inference(model, ev, m, noise=noise, rng=noise.rng(s)) for s in range(5)]))
                for m in (WS, ANALOG)}
        return ref, zero, mean

    (ref, zero, mean), dt = _timed(check)
    ok = all(v == ref for v in zero.values()) and mean[WS] >= mean[ANALOG] and dt < 300
    verdict("10", ok, f"reference {ref:.5f}; zero-noise {[round(v, 5) for v in zero.values()]}; "
                      f"noisy WS {mean[WS]:.5f} >= ANALOG {mean[ANALOG]:.5f}; {dt:.1f} s")


def test_c11_zero_noise_layer(verdict):
    def check():
        rng = np.random.default_rng(11)
        worst = -math.inf
        ope = OpeConfig()
        for _ in range(100):
            m, k, n = (int(v) for v in rng.integers(1, 33, 3))
            w, x = rng.uniform(-1, 1, (k, n)), rng.uniform(-1, 1, (m, k))
            g = GemmShape(m, k, n)
            ref = reference_layer(g, w, x, ope.n_t)
            for mode in (WS, IS):
                out = simulate_layer(g, w, x, mode, ope, P, ZERO_NOISE, rng)
                worst = max(worst, float(np.max(np.abs(out - ref))) - k * 2.0 ** (-ope.n_t - 1))
        return worst

    worst, dt = _timed(check)
    verdict("11", worst <= 0 and dt < 30, f"max (error - K*2^-(N_T+1)) = {worst:.3g} on 100 GEMMs x 2 modes, {dt:.1f} s")


CLI_RUNS = {
    "device-curve": ["device-curve"],
    "mac-sim": ["mac-sim", "--nlambda", "8", "--nt", "7", "--trials", "16"],
    "energy": ["energy", "--workload", str(builtin_path("resnet18")), "--ope", "2,8,8", "--mode", "ws"],
    "dse": ["dse"],
    "profile": ["profile", "--mode", "is"],
    "map": ["map"],
}


def test_c12_cli_determinism(verdict, tmp_path, capsys):
    mismatched, codes = [], []
    for name, argv in CLI_RUNS.items():
        outs = []
        for rep in range(2):
            d = tmp_path / f"{name}-{rep}"
            codes.append(cmd_dispatch([*argv, "--seed", "12", "--out-dir", str(d)]))
            outs.append(b"".join(p.read_bytes() for p in sorted(d.iterdir())))
        if outs[0] != outs[1] or not outs[0]:
            mismatched.append(name)
    capsys.readouterr()
    ok = not mismatched and all(c == 0 for c in codes)
    verdict("12", ok, f"{len(CLI_RUNS)} subcommands run twice, exit codes {sorted(set(codes))}, "
                      f"differing: {mismatched or 'none'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", *sys.argv[1:]]))
