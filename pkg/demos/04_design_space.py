"""
Choosing the array size
=======================

Sweep every (tiles, rows, columns) combination under the ring budget and rank
them by a blend of the geometric-mean and worst-case network EDP.
"""

# %%
from mrrsim import DseConstraints, builtin_workloads, select_config

nets = builtin_workloads()
res = select_config(nets, DseConstraints(), lam=0.5)
print(f"{len(res.rows)} configurations evaluated over {', '.join(res.networks)}")

# %%
best = sorted(res.rows, key=lambda r: r.m)[:8]
print(f"{'T':>3} {'R':>4} {'C':>2} {'G':>12} {'W_max':>12} {'M':>12}")
for r in best:
    print(f"{r.tiles:3d} {r.rows:4d} {r.cols:2d} {r.g:12.4e} {r.w_max:12.4e} {r.m:12.4e}")

# %%
# lambda trades the typical case against the worst network.
for lam in (0.0, 1.0):
    ch = select_config(nets, DseConstraints(), lam=lam).chosen
    print(f"lambda={lam}: T={ch.tiles} R={ch.rows} C={ch.cols}")
