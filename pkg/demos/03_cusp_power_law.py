"""
The cusp above the sink
=======================

Near sigma = pi/2 the surface rises like y0 + a x^(2/3).  Fit the power law
on the computed profile and compare with the prediction from beta and c0.
"""

import numpy as np

from sinkflow.nekrasov import FlowParams
from sinkflow.solver import solve
from sinkflow.surface import cusp_asymptotics, reconstruct_surface

params = FlowParams(3.0)
zeta, _ = solve(params)
sol = reconstruct_surface(zeta, params)
fit = cusp_asymptotics(sol)

print("fit window in x:", fit.window, "with", fit.points, "nodes")
print("fitted exponent:", fit.exponent, "(expected 2/3)")
print("fitted coefficient:", fit.coefficient)
print("coefficient with the exponent pinned to 2/3:", fit.coefficient_fixed)

# Expanding the boundary slopes around the cusp, with u = pi/2 - sigma:
#   x ~ c0 beta u^3 / 3,   y - y0 ~ c0 u^2 / 2
# and eliminating u gives a = 3^(2/3) c0^(1/3) / (2 beta^(2/3)).
print("predicted a (c0^(1/3) form):", fit.a)
print("same with sqrt(c0):", fit.a_sqrt_c0)

# Local slope of log(y - y0) against log x.  The window is stored in
# increasing sigma, so it starts at x = 1e-2 and ends at the cusp; the slope
# drifts toward 2/3 as x shrinks and the higher-order terms die out.
slopes = np.diff(np.log(fit.dy)) / np.diff(np.log(fit.x))
print(f"local exponent near x={fit.x[0]:.1e}:", slopes[0])
print(f"local exponent near x={fit.x[-1]:.1e}:", slopes[-1])
