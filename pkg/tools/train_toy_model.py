"""Train the bundled toy classifier and freeze it to src/mrrsim/data/toy_model.{json,bin}.

Plain numpy: full-precision training with Adam, then per-tensor 8-bit scales
calibrated on the training set. Run once; the outputs are committed.

    python tools/train_toy_model.py [--noise 0.55] [--steps 3000]
"""

import argparse
from pathlib import Path

import numpy as np

from mrrsim.inference import (
    ToyLayer, ToyModel, _lower, accuracy_eval, make_eval_set, save_toy_model,
)
from mrrsim.workload import LayerSpec

OUT = Path(__file__).resolve().parents[1] / "src" / "mrrsim" / "data" / "toy_model.json"
SPECS = [
    LayerSpec.conv("conv1", 1, 8, 3, 3, 6, 6),
    LayerSpec.conv("conv2", 8, 8, 3, 3, 4, 4),
    LayerSpec.gemm("fc", 1, 128, 10),
]


def shell(weights, noise, pattern_seed):
    layers = [ToyLayer(s, w.astype(np.float32), 1.0, 1.0) for s, w in zip(SPECS, weights)]
    return ToyModel("toy3", (8, 8, 1), 10, layers, pattern_seed, noise)


def fwd(ws, x):
    b = x.shape[0]
    p1 = _lower(SPECS[0], x)
    z1 = p1 @ ws[0]
    a1 = np.maximum(z1, 0).reshape(b, 6, 6, 8)
    p2 = _lower(SPECS[1], a1)
    z2 = p2 @ ws[1]
    a2 = np.maximum(z2, 0).reshape(b, 128)
    return p1, z1, a1, p2, z2, a2, a2 @ ws[2]


def grads(ws, x, y):
    b = x.shape[0]
    p1, z1, a1, p2, z2, a2, logits = fwd(ws, x)
    e = np.exp(logits - logits.max(1, keepdims=True))
    prob = e / e.sum(1, keepdims=True)
    loss = -np.mean(np.log(prob[np.arange(b), y] + 1e-12))
    dz3 = prob
    dz3[np.arange(b), y] -= 1
    dz3 /= b
    g3 = a2.T @ dz3
    dz2 = (dz3 @ ws[2].T).reshape(b * 16, 8) * (z2 > 0)
    g2 = p2.T @ dz2
    dp2 = (dz2 @ ws[1].T).reshape(b, 4, 4, 3, 3, 8)
    da1 = np.zeros((b, 6, 6, 8))
    for i in range(3):
        for j in range(3):
            da1[:, i : i + 4, j : j + 4, :] += dp2[:, :, :, i, j, :]
    dz1 = da1.reshape(b * 36, 8) * (z1 > 0)
    g1 = p1.T @ dz1
    return loss, [g1, g2, g3]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--noise", type=float, default=0.55)
    ap.add_argument("--steps", type=int, default=3000)
    ap.add_argument("--pattern-seed", type=int, default=7)
    args = ap.parse_args()

    rng = np.random.default_rng(123)
    ws = [rng.normal(0, np.sqrt(2 / k), (k, n)) for k, n in [(9, 8), (72, 8), (128, 10)]]
    model = shell(ws, args.noise, args.pattern_seed)
    train = make_eval_set(model, seed=10_000, size=20_000)
    m = [np.zeros_like(w) for w in ws]
    v = [np.zeros_like(w) for w in ws]
    lr, b1, b2 = 3e-3, 0.9, 0.999
    for step in range(1, args.steps + 1):
        idx = rng.integers(0, len(train), 128)
        loss, gs = grads(ws, train.images[idx], train.labels[idx])
        for i, g in enumerate(gs):
            m[i] = b1 * m[i] + (1 - b1) * g
            v[i] = b2 * v[i] + (1 - b2) * g * g
            ws[i] -= lr * (m[i] / (1 - b1**step)) / (np.sqrt(v[i] / (1 - b2**step)) + 1e-8)
        if step % 500 == 0:
            print(f"step {step} loss {loss:.4f}")

    _, _, a1, _, _, a2, _ = fwd(ws, train.images[:4000])
    in_scales = [1.0, float(a1.max()), float(a2.max())]
    layers = [
        ToyLayer(s, w.astype(np.float32), float(np.abs(w).max()) * 128 / 127, sc)
        for s, w, sc in zip(SPECS, ws, in_scales)
    ]
    model = ToyModel("toy3", (8, 8, 1), 10, layers, args.pattern_seed, args.noise)
    save_toy_model(model, OUT)
    ev = make_eval_set(model, seed=0)
    _, _, _, _, _, _, logits = fwd(ws, ev.images)
    print("float accuracy", np.mean(logits.argmax(1) == ev.labels))
    print("quantized accuracy", accuracy_eval(model, ev))


if __name__ == "__main__":
    main()
