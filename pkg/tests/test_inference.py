from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from mrrsim.device import NoiseParams, ZERO_NOISE
from mrrsim.errors import ShapeError
from mrrsim.inference import (
    EvalSet,
    ToyLayer,
    ToyModel,
    accuracy_eval,
    forward,
    layer_degradation_profile,
    load_toy_model,
    make_eval_set,
    quantize8,
    run_inference,
    save_toy_model,
)
from mrrsim.simulator import MappingMode
from mrrsim.workload import LayerSpec

GOLDEN = json.loads((Path(__file__).parent / "golden" / "toy_accuracy.json").read_text())
WS, IS, ANALOG = MappingMode.WS, MappingMode.IS, MappingMode.ANALOG
NOISE = NoiseParams(0.02, 0.04, seed=0)


@pytest.fixture(scope="module")
def model():
    return load_toy_model()


@pytest.fixture(scope="module")
def eval_set(model):
    return make_eval_set(model, GOLDEN["eval_seed"], GOLDEN["eval_size"])


def naive_forward(model: ToyModel, images: np.ndarray) -> np.ndarray:
    """Loop-based quantized forward pass used as an independent oracle."""
    out = []
    for img in images:
        x = quantize8(img, model.layers[0].input_scale)
        for i, layer in enumerate(model.layers):
            s, wq = layer.spec, layer.qweight
            if s.kind == "conv":
                y = np.zeros((s.h_out, s.w_out, s.c_out))
                for r in range(s.h_out):
                    for c in range(s.w_out):
                        patch = x[r : r + s.k_h, c : c + s.k_w, :].reshape(-1)
                        y[r, c] = patch @ wq
            else:
                y = x.reshape(-1) @ wq
            y = y * layer.input_scale * layer.weight_scale
            if i + 1 < len(model.layers):
                x = quantize8(np.maximum(y, 0), model.layers[i + 1].input_scale)
            else:
                x = y
        out.append(x.reshape(-1))
    return np.array(out)


def test_golden_accuracy(model, eval_set):
    assert accuracy_eval(model, eval_set) == GOLDEN["accuracy"]


def test_forward_matches_loop_oracle(model, eval_set):
    imgs = eval_set.images[:16]
    got = forward(model, imgs, [None] * 3)
    assert np.allclose(got, naive_forward(model, imgs), atol=1e-9)


def test_eval_set_deterministic(model):
    a, b = make_eval_set(model, 3, 64), make_eval_set(model, 3, 64)
    assert np.array_equal(a.images, b.images) and np.array_equal(a.labels, b.labels)
    assert len(a) == 64 and a.images.min() >= 0 and a.images.max() < 1


def test_label_permutation_gives_chance(model, eval_set):
    acc = accuracy_eval(model, eval_set.permuted_labels(1))
    assert abs(acc - 1 / model.num_classes) < 0.05


@pytest.mark.parametrize("mode", [WS, IS, ANALOG])
def test_zero_noise_equals_reference(model, eval_set, mode):
    assert run_inference(model, eval_set, mode, noise=ZERO_NOISE) == accuracy_eval(model, eval_set)


def _mean_acc(model, ev, mode, reps=5):
    return float(np.mean([run_inference(model, ev, mode, noise=NOISE, rng=NOISE.rng(s)) for s in range(reps)]))


def test_robustness_ordering(model, eval_set):
    clean = accuracy_eval(model, eval_set)
    analog = _mean_acc(model, eval_set, ANALOG)
    ws = _mean_acc(model, eval_set, WS)
    assert analog <= clean
    assert ws >= analog


def test_seed_determinism(model, eval_set):
    a = run_inference(model, eval_set, IS, noise=NOISE, rng=NOISE.rng(4))
    b = run_inference(model, eval_set, IS, noise=NOISE, rng=NOISE.rng(4))
    assert a == b


@pytest.mark.parametrize("mode", [WS, IS])
def test_zero_noise_degradation_is_zero(model, eval_set, mode):
    for layer in range(3):
        assert layer_degradation_profile(model, eval_set, layer, mode, reps=2, noise=ZERO_NOISE) == 0.0


def test_single_layer_isolation(model, eval_set):
    imgs = eval_set.images[:32]
    _, clean = forward(model, imgs, [None] * 3, trace=True)
    _, noisy = forward(model, imgs, [None, WS, None], noise=NOISE, rng=NOISE.rng(0), trace=True)
    assert np.array_equal(clean[0], noisy[0]) and np.array_equal(clean[1], noisy[1])
    assert not np.array_equal(clean[2], noisy[2])


def test_degradation_non_negative(model, eval_set):
    d = layer_degradation_profile(model, eval_set, 2, IS, reps=3, noise=NOISE)
    assert d >= 0


def rail_model() -> tuple[ToyModel, EvalSet]:
    """One dense layer with mid-range weights fed inputs near the -1 rail."""
    rng = np.random.default_rng(21)
    k, n = 16, 10
    w = rng.uniform(-0.06, 0.06, (k, n)).astype(np.float32)
    layer = ToyLayer(LayerSpec.gemm("fc", 1, k, n), w, weight_scale=1.0, input_scale=1.0)
    m = ToyModel("rail", (1, 1, k), n, [layer], pattern_seed=0, pattern_noise=0.0)
    images = -1.0 + rng.integers(1, 9, (400, 1, 1, k)) / 128
    labels = np.argmax(forward(m, images, [None]), axis=1)
    return m, EvalSet(images, labels, 0)


def test_constructed_instance_separates_modes():
    m, ev = rail_model()
    assert accuracy_eval(m, ev) == 1.0
    d_ws = layer_degradation_profile(m, ev, 0, WS, reps=5, noise=NOISE)
    d_is = layer_degradation_profile(m, ev, 0, IS, reps=5, noise=NOISE)
    # mid-range weights sit on the steep part of the transfer curve, rail inputs on the flat part
    assert d_ws > d_is + 10.0


def _sweep(model, ev, modes, sigma_dac):
    means = []
    for sigma_th in (0.02, 0.04, 0.08):
        n = NoiseParams(sigma_dac, sigma_th, seed=0)
        ds = [layer_degradation_profile(model, ev, l, m, reps=5, noise=n) for m in modes for l in range(3)]
        means.append(float(np.mean(ds)))
    return means


def test_thermal_sigma_trend_default_dac(model, eval_set):
    means = _sweep(model, eval_set, (WS, IS), 0.02)
    assert means[0] <= means[1] <= means[2]


@pytest.mark.parametrize("mode", [WS, IS])
def test_thermal_sigma_trend_isolated(model, eval_set, mode):
    means = _sweep(model, eval_set, (mode,), 0.0)
    assert means[0] <= means[1] <= means[2]


def test_model_round_trip(model, tmp_path):
    path = tmp_path / "m.json"
    save_toy_model(model, path)
    again = load_toy_model(path)
    for a, b in zip(model.layers, again.layers):
        assert np.array_equal(a.weight, b.weight) and a.spec == b.spec
    assert (tmp_path / "m.bin").stat().st_size == 4 * sum(l.weight.size for l in model.layers)


def test_shape_errors(model, eval_set):
    with pytest.raises(ShapeError):
        run_inference(model, eval_set, [WS, WS])
    with pytest.raises(ShapeError):
        layer_degradation_profile(model, eval_set, 3, WS)
    bad = ToyLayer(LayerSpec.gemm("fc", 1, 5, 10), np.zeros((5, 10), np.float32), 1.0, 1.0)
    with pytest.raises(ShapeError):
        ToyModel("bad", (2, 2, 1), 10, [bad], 0, 0.0)
