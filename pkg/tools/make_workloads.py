"""Regenerate the bundled workload descriptors in src/mrrsim/data/workloads/.

Shapes follow the standard public architecture definitions at ImageNet input
resolution (224x224); see PROVENANCE.md next to the generated files.
"""

from pathlib import Path

from mrrsim.workload import LayerSpec, NetworkSpec, save_network

OUT = Path(__file__).resolve().parents[1] / "src" / "mrrsim" / "data" / "workloads"
conv, gemm = LayerSpec.conv, LayerSpec.gemm


def alexnet():
    return [
        conv("conv1", 3, 64, 11, 11, 55, 55),
        conv("conv2", 64, 192, 5, 5, 27, 27),
        conv("conv3", 192, 384, 3, 3, 13, 13),
        conv("conv4", 384, 256, 3, 3, 13, 13),
        conv("conv5", 256, 256, 3, 3, 13, 13),
        gemm("fc6", 1, 9216, 4096),
        gemm("fc7", 1, 4096, 4096),
        gemm("fc8", 1, 4096, 1000),
    ]


def vgg16():
    cfg = [(64, 224), (64, 224), (128, 112), (128, 112), (256, 56), (256, 56), (256, 56),
           (512, 28), (512, 28), (512, 28), (512, 14), (512, 14), (512, 14)]
    layers, c_in = [], 3
    for i, (c, hw) in enumerate(cfg, 1):
        layers.append(conv(f"conv{i}", c_in, c, 3, 3, hw, hw))
        c_in = c
    layers += [gemm("fc14", 1, 25088, 4096), gemm("fc15", 1, 4096, 4096), gemm("fc16", 1, 4096, 1000)]
    return layers


def resnet18():
    layers = [conv("conv1", 3, 64, 7, 7, 112, 112)]
    c_in = 64
    for stage, (c, hw) in enumerate([(64, 56), (128, 28), (256, 14), (512, 7)], 1):
        for block in range(2):
            first = f"layer{stage}.{block}"
            layers.append(conv(f"{first}.conv1", c_in, c, 3, 3, hw, hw))
            layers.append(conv(f"{first}.conv2", c, c, 3, 3, hw, hw))
            if block == 0 and c_in != c:
                layers.append(conv(f"{first}.downsample", c_in, c, 1, 1, hw, hw))
            c_in = c
    layers.append(gemm("fc", 1, 512, 1000))
    return layers


def mobilenet_v3_small():
    # (kernel, expand, out, use_se, stride) per inverted-residual block
    blocks = [(3, 16, 16, True, 2), (3, 72, 24, False, 2), (3, 88, 24, False, 1),
              (5, 96, 40, True, 2), (5, 240, 40, True, 1), (5, 240, 40, True, 1),
              (5, 120, 48, True, 1), (5, 144, 48, True, 1), (5, 288, 96, True, 2),
              (5, 576, 96, True, 1), (5, 576, 96, True, 1)]

    def squeeze(c):
        return max(8, int(c // 4 + 4) // 8 * 8)

    layers = [conv("stem", 3, 16, 3, 3, 112, 112)]
    c_in, hw = 16, 112
    for i, (k, exp, out, se, s) in enumerate(blocks):
        p = f"block{i}"
        if exp != c_in:
            layers.append(conv(f"{p}.expand", c_in, exp, 1, 1, hw, hw))
        hw = hw // s
        # depthwise lowered as one input channel per output channel
        layers.append(conv(f"{p}.depthwise", 1, exp, k, k, hw, hw))
        if se:
            sq = squeeze(exp)
            layers.append(gemm(f"{p}.se_reduce", 1, exp, sq))
            layers.append(gemm(f"{p}.se_expand", 1, sq, exp))
        layers.append(conv(f"{p}.project", exp, out, 1, 1, hw, hw))
        c_in = out
    layers.append(conv("last_conv", 96, 576, 1, 1, 7, 7))
    layers += [gemm("classifier.0", 1, 576, 1024), gemm("classifier.3", 1, 1024, 1000)]
    return layers


def gpt2_medium(seq=1024, d=1024, n_layer=24):
    layers = []
    for b in range(n_layer):
        layers += [gemm(f"h{b}.attn.qkv", seq, d, 3 * d), gemm(f"h{b}.attn.proj", seq, d, d),
                   gemm(f"h{b}.mlp.fc", seq, d, 4 * d), gemm(f"h{b}.mlp.proj", seq, 4 * d, d)]
    return layers


def vit_base(tokens=197, d=768, n_layer=12):
    layers = [conv("patch_embed", 3, d, 16, 16, 14, 14)]
    for b in range(n_layer):
        layers += [gemm(f"blocks{b}.attn.qkv", tokens, d, 3 * d), gemm(f"blocks{b}.attn.proj", tokens, d, d),
                   gemm(f"blocks{b}.mlp.fc1", tokens, d, 4 * d), gemm(f"blocks{b}.mlp.fc2", tokens, 4 * d, d)]
    layers.append(gemm("head", 1, d, 1000))
    return layers


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for fn in (alexnet, vgg16, resnet18, mobilenet_v3_small, gpt2_medium, vit_base):
        save_network(NetworkSpec(fn.__name__, tuple(fn())), OUT / f"{fn.__name__}.json")
        print("wrote", fn.__name__)


if __name__ == "__main__":
    main()
