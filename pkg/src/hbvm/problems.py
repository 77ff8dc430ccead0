"""Catalog of Hamiltonian test systems with analytic gradients.

States are ordered coordinates-first, (q, p), matching the canonical
structure matrix.  Polynomial energies record their total degree; closed
form reference solutions, where present, correspond to the catalog's
default initial state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .integrator import HamiltonianSystem

__all__ = ["ProblemSpec", "catalog", "get_problem", "KEPLER_ECCENTRICITY"]

KEPLER_ECCENTRICITY = 0.6


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    system: HamiltonianSystem
    default_y0: np.ndarray
    reference_solution: Callable[[float], np.ndarray] | None = None
    notes: str = ""

    def __post_init__(self):
        object.__setattr__(self, "default_y0",
                           np.asarray(self.default_y0, dtype=float))


# -- one-degree-of-freedom oscillators --------------------------------------


def _harmonic() -> ProblemSpec:
    def H(y):
        q, p = y
        return 0.5 * (p * p + q * q)

    def grad(y):
        return y.copy()

    q0, p0 = 1.0, 0.0

    def exact(t):
        return np.array([q0 * math.cos(t) + p0 * math.sin(t),
                         -q0 * math.sin(t) + p0 * math.cos(t)])

    return ProblemSpec(
        name="harmonic",
        system=HamiltonianSystem(dim=2, H=H, grad_H=grad, poly_degree=2),
        default_y0=[q0, p0],
        reference_solution=exact,
        notes="unit-frequency oscillator; exact solution is a rotation",
    )


def _quartic() -> ProblemSpec:
    def H(y):
        q, p = y
        return 0.5 * p * p + 0.25 * q ** 4

    def grad(y):
        q, p = y
        return np.array([q ** 3, p])

    return ProblemSpec(
        name="quartic",
        system=HamiltonianSystem(dim=2, H=H, grad_H=grad, poly_degree=4),
        default_y0=[1.0, 1.0],
        notes="stiffening quartic potential; degree-4 energy",
    )


def _sextic() -> ProblemSpec:
    def H(y):
        q, p = y
        return 0.5 * p * p + q ** 6 / 6.0

    def grad(y):
        q, p = y
        return np.array([q ** 5, p])

    return ProblemSpec(
        name="sextic",
        system=HamiltonianSystem(dim=2, H=H, grad_H=grad, poly_degree=6),
        default_y0=[1.0, 1.0],
        notes="degree-6 confinement; the standard high-degree conservation case",
    )


def _pendulum() -> ProblemSpec:
    def H(y):
        q, p = y
        return 0.5 * p * p - math.cos(q)

    def grad(y):
        q, p = y
        return np.array([math.sin(q), p])

    return ProblemSpec(
        name="pendulum",
        system=HamiltonianSystem(dim=2, H=H, grad_H=grad),
        default_y0=[1.5, 0.5],
        notes="non-polynomial energy; libration orbit well inside the separatrix",
    )


# -- two degrees of freedom --------------------------------------------------


def _henon_heiles() -> ProblemSpec:
    def H(y):
        q1, q2, p1, p2 = y
        return (0.5 * (p1 * p1 + p2 * p2) + 0.5 * (q1 * q1 + q2 * q2)
                + q1 * q1 * q2 - q2 ** 3 / 3.0)

    def grad(y):
        q1, q2, p1, p2 = y
        return np.array([q1 + 2.0 * q1 * q2,
                         q2 + q1 * q1 - q2 * q2,
                         p1, p2])

    return ProblemSpec(
        name="henon-heiles",
        system=HamiltonianSystem(dim=4, H=H, grad_H=grad, poly_degree=3),
        default_y0=[0.1, -0.1, 0.4, 0.1],
        notes="cubic coupling of two oscillators at a bounded energy level",
    )


def _kepler_reference(t: float, e: float) -> np.ndarray:
    """State on the eccentricity-e orbit started at perihelion at t = 0.

    Unit gravitational parameter and unit semi-major axis, so the mean
    motion is 1 and t equals the mean anomaly.  The eccentric anomaly comes
    from a Newton solve of E - e sin E = t to 1e-14.
    """
    M = t
    E = M + e * math.sin(M)
    for _ in range(100):
        delta = (E - e * math.sin(E) - M) / (1.0 - e * math.cos(E))
        E -= delta
        if abs(delta) <= 1e-14:
            break
    else:
        raise RuntimeError("eccentric-anomaly iteration stalled")
    cosE, sinE = math.cos(E), math.sin(E)
    r = 1.0 - e * cosE
    b = math.sqrt(1.0 - e * e)
    return np.array([cosE - e, b * sinE, -sinE / r, b * cosE / r])


def _kepler() -> ProblemSpec:
    def H(y):
        q, p = y[:2], y[2:]
        return 0.5 * float(p @ p) - 1.0 / math.sqrt(float(q @ q))

    def grad(y):
        q, p = y[:2], y[2:]
        r3 = float(q @ q) ** 1.5
        return np.concatenate((q / r3, p))

    e = KEPLER_ECCENTRICITY
    y0 = [1.0 - e, 0.0, 0.0, math.sqrt((1.0 + e) / (1.0 - e))]
    return ProblemSpec(
        name="kepler",
        system=HamiltonianSystem(dim=4, H=H, grad_H=grad),
        default_y0=y0,
        reference_solution=lambda t: _kepler_reference(t, e),
        notes=f"two-body orbit, eccentricity {e}, period 2*pi, "
              "perihelion start; reference via the eccentric anomaly",
    )


def catalog() -> list[ProblemSpec]:
    """All test problems, oscillators first."""
    return [_harmonic(), _quartic(), _sextic(), _pendulum(),
            _henon_heiles(), _kepler()]


def get_problem(name: str) -> ProblemSpec:
    """Look a problem up by name (dashes and underscores interchangeable)."""
    wanted = name.strip().lower().replace("_", "-")
    for prob in catalog():
        if prob.name == wanted:
            return prob
    known = ", ".join(p.name for p in catalog())
    raise KeyError(f"unknown problem {name!r}; known: {known}")
