"""
Checking the proven bounds numerically
======================================

Every quantitative bound the theory supplies can be measured.  This runs
the same checks as ``sinkflow verify``.
"""

from sinkflow.diagnostics import (check_constants, check_contraction,
                                  check_operator_bounds, check_solution)
from sinkflow.nekrasov import FlowParams
from sinkflow.solver import solve
from sinkflow.surface import reconstruct_surface


def show(results):
    for r in results:
        flag = "ok  " if r.passed else "FAIL"
        print(f"  {flag} {r.name:40s} bound={r.bound:.6g}  observed={r.observed:.6g}")


print("constants")
show(check_constants())

print("operator H and the running integral, 1000 random inputs")
show(check_operator_bounds(1000, seed=42))

print("Lipschitz constant of Phi")
for alpha in (3.0, 5.0, 10.0):
    show([check_contraction(FlowParams(alpha), 100, seed=42)])

print("solved state at alpha = 3")
params = FlowParams(3.0)
zeta, _ = solve(params)
show(check_solution(zeta, reconstruct_surface(zeta, params), params))
