"""
Typical points on the l_p sphere are not sparse
===============================================

Draw points from the cone measure on the positive part of the unit sphere
of l_p^n and look at how large the biggest coordinate is.  Even for small
p it is only a log factor above the flat value n^(-1/p).
"""

import math

import numpy as np

from lpwidths import RngState, WidthQuery, estimate_widths
from lpwidths.analytic import bound_envelope

SAMPLES = 100_000

# %%
# sigma_0(x)_inf is just the largest coordinate.  Divide its average by
# the shape [log(en)/n]^(1/p); the ratio settles quickly as n grows.
for p in (0.5, 1.0, 2.0):
    print(f"p = {p}")
    for n in (10, 100, 1000):
        q = WidthQuery.build(p, math.inf, n, [0], "cone")
        r = estimate_widths(q, SAMPLES, RngState(0, n))[0]
        shape = bound_envelope("thm6-upper", p, math.inf, n)
        print(f"  n={n:5d}  E x_1* = {r.mean:.4g} +- {r.std_error:.1g}   ratio to shape = {r.mean / shape:.3f}")

# %%
# The whole decay profile for n = 100, scaled by n^(1/p).  A flat vector
# would give 1 everywhere; the cone measure stays within a small factor.
n = 100
for p in (0.5, 1.0, 2.0):
    res = estimate_widths(WidthQuery.build(p, math.inf, n, range(0, n, 10), "cone"), SAMPLES, RngState(1))
    scaled = np.array([n ** (1 / p) * res[m].mean for m in res])
    print(f"p={p}: " + " ".join(f"{v:6.2f}" for v in scaled))
