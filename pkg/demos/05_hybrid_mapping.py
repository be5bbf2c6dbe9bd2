"""
Noise profiling and hybrid mapping
==================================

Run the bundled 8-bit toy CNN on the simulated array, measure how much each
layer suffers from device noise under each mapping, then pick a mapping per
layer that balances accuracy loss against EDP.
"""

# %%
import numpy as np

from mrrsim import (
    LayerProfile,
    MappingMode,
    NoiseParams,
    OpeConfig,
    accuracy_eval,
    layer_degradation_profile,
    layer_edp,
    load_toy_model,
    make_eval_set,
    run_inference,
    select_mappings,
)

model = load_toy_model()
ev = make_eval_set(model, seed=0, size=512)
print("exact 8-bit accuracy:", accuracy_eval(model, ev))

# %%
# Every mode is exact without noise; with noise the fully analog mapping
# suffers most because both operands pass through the heaters.
noise = NoiseParams(sigma_dac=0.02, sigma_th=0.04, seed=0)
for mode in MappingMode:
    accs = [run_inference(model, ev, mode, noise=noise, rng=noise.rng(s)) for s in range(3)]
    print(f"{mode.value:7} noisy accuracy {np.mean(accs):.4f}")

# %%
# Per-layer profile: only one layer is noisy at a time.
ope = OpeConfig(tiles=1, rows=8, cols=8)
profiles = []
for i, (layer, g) in enumerate(zip(model.layers, model.network().gemms())):
    d = {m: layer_degradation_profile(model, ev, i, m, reps=3, noise=noise) for m in (MappingMode.IS, MappingMode.WS)}
    e = {m: layer_edp(g, ope, m).edp for m in (MappingMode.IS, MappingMode.WS)}
    profiles.append(LayerProfile(layer.name, d[MappingMode.IS], d[MappingMode.WS], e[MappingMode.IS], e[MappingMode.WS]))
    print(f"{layer.name:6} d_is={d[MappingMode.IS]:.3f} d_ws={d[MappingMode.WS]:.3f}  "
          f"e_is={e[MappingMode.IS]:.3e} e_ws={e[MappingMode.WS]:.3e}")

# %%
decision = select_mappings(profiles)
for l in decision.layers:
    print(f"{l.name:6} -> {l.chosen.value}  (alpha {l.alpha:.3f}, M_is {l.m_is:.3f}, M_ws {l.m_ws:.3f})")
print(f"hybrid EDP {decision.total_edp():.3e} vs all-WS {sum(p.e_ws for p in profiles):.3e}")
