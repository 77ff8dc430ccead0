"""Measured convergence order is 2s, independent of the stage count k.

Adding stages beyond s buys conservation, not classical order; the order
stays at 2s.  Errors are measured at a fixed horizon against closed-form
solutions (a rotation for the oscillator, the eccentric-anomaly solution
for the two-body orbit).
"""

import math

from hbvm import HbvmSpec, SolverConfig, convergence_order, get_problem

harmonic = get_problem("harmonic")
kepler = get_problem("kepler")

newton = SolverConfig(mode="newton", tol=1e-14)
fixed = SolverConfig(tol=1e-15)

print("problem    (k,s)  expected  measured   errors (halving h)")
for prob, cfg, hmax_by_s in (
    (harmonic, fixed, {2: 0.4, 3: 0.5}),
    (kepler, newton, {2: 0.1, 3: 0.2}),
):
    for k, s in [(4, 2), (6, 2), (6, 3)]:
        h_list = [hmax_by_s[s] / 2 ** i for i in range(4)]
        fit = convergence_order(HbvmSpec(k, s), prob, 2 * math.pi, h_list, cfg)
        errs = "  ".join(f"{e:.2e}" for e in fit.errors)
        print(f"{prob.name:10s} ({k},{s})     {2 * s}     "
              f"{fit.slope:6.3f}   {errs}")
print()
print("the two k = 6 rows with s = 2 reproduce the k = 4 errors almost")
print("digit for digit: once the quadrature is exact enough, extra stages")
print("change nothing about the underlying degree-2 polynomial.")
