"""
A measure that prefers sparse vectors
=====================================

Reweight the cone measure by prod x_i^beta with beta = p/n - 1.  Under this
tensor measure the sorted coordinates fall off geometrically.  We compare the
one-dimensional quadrature with plain Monte Carlo and look at the ratios
between consecutive order statistics.
"""

import math

from lpwidths import RngState, WidthQuery, estimate_widths, theorem17_quadrature

n = 100

# %%
# Quadrature against Monte Carlo for the three largest coordinates.
for p in (0.5, 1.0, 2.0):
    mc = estimate_widths(WidthQuery.build(p, math.inf, n, [0, 1, 2], "tensor-sparse"), 200_000, RngState(2))
    for m in (1, 2, 3):
        quad = theorem17_quadrature(p, n, m)
        r = mc[m - 1]
        print(f"p={p} x_{m}*: quadrature {quad:.5f}  MC {r.mean:.5f} +- {r.std_error:.5f}")

# %%
# Consecutive ratios E x_m* / E x_{m+1}* at n = 200.  They start well above
# 1/p + 1, come closest to it for m around 10, and climb again once m is a
# noticeable fraction of n.
for p in (0.5, 1.0, 2.0):
    vals = [theorem17_quadrature(p, 200, m) for m in range(1, 41)]
    ratios = [a / b for a, b in zip(vals, vals[1:])]
    picks = {m: ratios[m - 1] for m in (1, 2, 4, 8, 16, 32)}
    print(f"p={p} (1/p+1 = {1 / p + 1:g}): " + "  ".join(f"m={m}: {r:.3f}" for m, r in picks.items()))
