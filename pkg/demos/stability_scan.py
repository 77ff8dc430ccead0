"""Linear stability: the region is exactly the left half-plane.

On the imaginary axis the stability function has unit modulus to rounding,
and inside the left half-plane its modulus never exceeds one.  This holds
for every admissible (k, s, node family), because the stability function
only depends on the nonzero spectrum of the stage matrix, which the methods
all share with the s-stage Gauss method.
"""

import numpy as np

from hbvm import (
    HbvmSpec,
    NodeFamily,
    a_stability_scan,
    hbvm_tableau,
    stability_function,
)

tab = hbvm_tableau(HbvmSpec(4, 2))

print("=== |R(iy)| along the imaginary axis, (k, s) = (4, 2) ===")
for y in (1e-3, 1e-1, 1.0, 1e1, 1e3):
    r = stability_function(tab, 1j * y)
    print(f"  y = {y:8.0e}:  |R(iy)| - 1 = {abs(r) - 1.0:+.2e}")
print()

print("=== |R(z)| at points in the open left half-plane ===")
for z in (-0.1 + 0.5j, -1.0 + 0.0j, -2.0 + 3.0j, -50.0 - 10.0j):
    print(f"  z = {z}:  |R(z)| = {abs(stability_function(tab, z)):.6f}")
print()

print("=== worst case over dense grids, several methods ===")
specs = [HbvmSpec(1, 1), HbvmSpec(4, 2), HbvmSpec(6, 3),
         HbvmSpec(6, 3, NodeFamily.LOBATTO), HbvmSpec(10, 4)]
for spec in specs:
    scan = a_stability_scan(hbvm_tableau(spec))
    print(f"  (k={spec.k}, s={spec.s}, {spec.family.value:7s}): "
          f"max ||R(iy)|-1| = {scan.imag_axis_max_deviation:.2e}, "
          f"max |R| in C- = {scan.lhp_max_modulus:.12f}")
print()

print("as a contrast, the forward Euler polynomial 1 + z is far from")
print("A-stable: |1 + iy| grows without bound along the axis, e.g.",
      abs(1 + 10j), "at y = 10.")
