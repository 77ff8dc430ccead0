"""Exact conservation of polynomial energies, and its sharp threshold.

A degree-s method with k stages conserves a polynomial energy of degree nu
whenever k >= nu * s / 2: the quadrature then integrates the energy's line
integral along the underlying polynomial exactly, so the discrete step
inherits conservation.  Below the threshold the drift reappears.
"""

import numpy as np

from hbvm import HbvmSpec, SolverConfig, energy_drift, get_problem, integrate

cfg = SolverConfig(tol=1e-15)

print("=== sextic oscillator (energy degree nu = 6), s = 2 ===")
print("threshold: k >= nu s / 2 = 6")
sext = get_problem("sextic")
for k in (2, 4, 6, 8):
    traj = integrate(HbvmSpec(k, 2), sext.system, sext.default_y0,
                     0.1, 1000, cfg)
    rel = energy_drift(traj)[0] / abs(traj.energies[0])
    marker = "conserved" if k >= 6 else "drifts"
    print(f"  k = {k}: relative energy deviation over 1000 steps "
          f"= {rel:.2e}  ({marker})")
print()

print("=== quartic oscillator (nu = 4), s = 2, threshold k >= 4 ===")
quart = get_problem("quartic")
for k in (2, 3, 4, 6):
    traj = integrate(HbvmSpec(k, 2), quart.system, quart.default_y0,
                     0.1, 500, cfg)
    rel = energy_drift(traj)[0] / abs(traj.energies[0])
    print(f"  k = {k}: {rel:.2e}")
print()

print("=== non-polynomial energy: the pendulum ===")
print("no finite k conserves exactly, but the drift collapses with the")
print("quadrature precision ('practical' conservation):")
pend = get_problem("pendulum")
for k in (2, 4, 6, 8):
    traj = integrate(HbvmSpec(k, 2), pend.system, pend.default_y0,
                     0.1, 500, cfg)
    print(f"  k = {k}: max |H - H0| = {energy_drift(traj)[0]:.2e}")
print()

print("for contrast, the k = s = 2 method (classical Gauss) on the same")
print("pendulum run keeps the energy error bounded but visible, as any")
print("symplectic method does; the rows above show the quadrature taking")
print("that error down to the solver tolerance instead.")
