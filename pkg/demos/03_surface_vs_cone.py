"""
Surface measure through importance weights
==========================================

The normalized surface measure has density (sum x_i^(2p-2))^(1/2) against
the cone measure, up to an unknown constant.  Self-normalized importance
sampling removes the constant.  For p = 1 and p = 2 the weight is constant
and both estimators agree to rounding.
"""

import math

from lpwidths import RngState, WidthQuery, estimate_widths

n, samples = 50, 100_000

for p in (0.5, 1.0, 2.0, 3.0):
    ms = [0, 5, 25]
    cone = estimate_widths(WidthQuery.build(p, math.inf, n, ms, "cone"), samples, RngState(3))
    surf = estimate_widths(WidthQuery.build(p, math.inf, n, ms, "surface"), samples, RngState(3))
    for m in ms:
        c, s = cone[m], surf[m]
        print(f"p={p} m={m:2d}: cone {c.mean:.6f}  surface {s.mean:.6f}  difference {s.mean - c.mean:+.2e}")
