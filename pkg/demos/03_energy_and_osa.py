"""
Per-layer energy, delay and EDP
===============================

Price a whole network layer by layer, compare the two stationary mappings and
see what the shift-and-add stage buys.
"""

# %%
from mrrsim import OpeConfig, MappingMode, layer_edp, load_network
from mrrsim.workload import builtin_path

net = load_network(builtin_path("alexnet"))
ope = OpeConfig(tiles=1, rows=8, cols=8, n_t=7)
print(f"{'layer':8} {'M':>6} {'K':>6} {'N':>5} {'EDP ws [J s]':>14} {'EDP is [J s]':>14}")
for spec, g in zip(net.layers, net.gemms()):
    ws, is_ = layer_edp(g, ope, MappingMode.WS), layer_edp(g, ope, MappingMode.IS)
    print(f"{spec.name:8} {g.m:6d} {g.k:6d} {g.n:5d} {ws.edp:14.4e} {is_.edp:14.4e}")

# %%
# Dense layers have a single input row, so keeping inputs on the rings and
# streaming the weights (IS) avoids re-tuning thousands of rings.

# %%
# Breakdown of the first convolution: static ring locking dominates because
# the thermo-optic reprogramming time sets the delay.
cost = layer_edp(net.gemms()[0], ope, MappingMode.WS)
for part, joules in sorted(cost.breakdown.items(), key=lambda kv: -kv[1]):
    print(f"{part:13} {joules:.3e} J  ({joules / cost.energy_j:6.2%})")

# %%
# Turning the shift-and-add stage off multiplies detections and conversions by
# n_t + 1. The direction is always an improvement; here the magnitude is small
# since static power is untouched.
off = OpeConfig(tiles=1, rows=8, cols=8, n_t=7, osa_enabled=False)
tot_on = sum(layer_edp(g, ope, MappingMode.WS).edp for g in net.gemms())
tot_off = sum(layer_edp(g, off, MappingMode.WS).edp for g in net.gemms())
print(f"network EDP with OSA {tot_on:.4e}, without {tot_off:.4e} ({1 - tot_on / tot_off:.2%} lower)")
