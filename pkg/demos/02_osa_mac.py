"""
Signed digits and optical shift-and-add
=======================================

Inputs are streamed as balanced digits in {-1, 0, +1}. The delay chain scales
each time slot by a power of two so that one photodetection already holds the
full multiply-accumulate.
"""

# %%
import numpy as np

from mrrsim import decode_value, encode_signed_digits, osa_mac
from mrrsim.encoding import mac_event_counts

s = encode_signed_digits(0.75, 2)
print("0.75 with n_t=2 ->", s.digits, "(least significant first), decodes to", decode_value(s))

# %%
# Quantization error shrinks by half for every extra digit.
x = np.random.default_rng(0).uniform(-0.999, 0.999, 5000)
for n_t in (1, 3, 5, 7):
    err = max(abs(decode_value(encode_signed_digits(float(v), n_t)) - v) for v in x)
    print(f"n_t={n_t}: max error {err:.5f} (bound {2.0 ** (-n_t - 1):.5f})")

# %%
# One MAC across 8 wavelength channels: the optical sum equals the direct dot
# product of the decoded inputs.
rng = np.random.default_rng(1)
w = rng.uniform(-1, 1, 8)
streams = [encode_signed_digits(float(v), 7) for v in rng.uniform(-1, 1, 8)]
direct = sum(a * decode_value(st) for a, st in zip(w, streams))
print(f"osa {osa_mac(list(w), streams):.15f}  direct {direct:.15f}")

# %%
# The point of the delay chain: conversions per MAC.
for osa in (True, False):
    products, detections = mac_event_counts(8, 7, osa)
    print(f"OSA={osa}: {products} slot products, {detections} detection/ADC events")
