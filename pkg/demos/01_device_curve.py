"""
Microring transfer curve
========================

Walk the heater voltage across its range and watch each stage of the
thermo-optic chain: heating, resonance shift, differential transmission and
finally the normalized weight.
"""

# %%
import numpy as np

from mrrsim import MrrParams, NoiseParams, device_curve, noisy_weight, tuning_figures, voltage_from_weight

p = MrrParams()
curve = device_curve(p, points=9)
print(f"{'V':>6} {'dT [K]':>8} {'dlam [nm]':>10} {'T_diff':>8} {'w':>8}")
for row in zip(*curve.values()):
    print("{:6.3f} {:8.2f} {:10.4f} {:8.4f} {:8.4f}".format(*row))

# %%
# The weight falls monotonically from +1 at the lowest voltage to -1 at the
# highest, so every weight has exactly one programming voltage.
v = voltage_from_weight(np.array([-1.0, -0.5, 0.0, 0.5, 1.0]), p)
print("voltages for w = -1, -0.5, 0, 0.5, 1:", np.round(v, 6))

# %%
# Small-signal tuning figures.
eff, power = tuning_figures(p)
print(f"tuning efficiency {eff:.4f} nm/mW, average locking power {power:.3f} mW")

# %%
# Programming noise is far from uniform across the range: the flat tail of
# the Lorentzian near -1 hides heater errors, the steep flank around 0 and +1
# amplifies them.
n = NoiseParams(sigma_dac=0.02, sigma_th=0.04, seed=0)
rng = n.rng()
for w in (-0.99, -0.5, 0.0, 0.5, 0.99):
    draws = noisy_weight(np.full(20_000, voltage_from_weight(w, p)), p, n, rng)
    print(f"target {w:+.2f}: realized mean {draws.mean():+.4f}, std {draws.std():.4f}")
