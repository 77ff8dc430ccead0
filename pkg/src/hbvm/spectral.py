"""Eigenvalue machinery for small dense matrices and the structural checks
on the constructed tableaux: spectrum classification against the order-2s
reference matrix, invariant-subspace and basis-transform residuals, and
linear-stability scans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .legendre import AbscissaeSystem, NodeFamily, eval_orthonormal, random_custom_system
from .spectral_qr import EigenConvergenceError, eigenvalues
from .tableau import (
    ButcherTableau,
    HbvmSpec,
    abscissae,
    basis_matrices,
    filtered_tableau,
    hbvm_tableau,
    xhat_matrix,
    xs_matrix,
    xtilde_matrix,
)

__all__ = [
    "EigenConvergenceError",
    "PoleError",
    "SpectrumReport",
    "StabilityScan",
    "eigenvalues",
    "classify_spectrum",
    "isospectral_check",
    "invariant_subspace_residual",
    "w_transform_check",
    "stability_function",
    "a_stability_scan",
    "spec_matrix",
    "verification_sweep",
]

# |lambda| at or below this multiple of max(1, ||A||) counts as a zero
# eigenvalue; the nonzero spectrum sits above ~0.08 for s <= 6.
ZERO_EIG_REL_TOL = 1e-8


class PoleError(ArithmeticError):
    """The linear-stability resolvent is singular at the sampled point."""


@dataclass(frozen=True)
class SpectrumReport:
    """Classified spectrum of a stage matrix against its reference.

    The k eigenvalues split into zero_count values below the zero threshold
    and the rest, which are greedily paired with the reference spectrum;
    max_match_distance is the worst pairing distance (inf on a count
    mismatch).
    """

    k: int
    s: int
    family: str
    eigenvalues: tuple[complex, ...]
    zero_count: int
    nonzero: tuple[complex, ...]
    reference: tuple[complex, ...]
    max_match_distance: float
    zero_threshold: float

    def passes(self, tol: float) -> bool:
        return (self.zero_count == self.k - self.s
                and self.max_match_distance <= tol)


def _sorted_complex(values) -> tuple[complex, ...]:
    return tuple(sorted((complex(v) for v in values), key=lambda z: (z.real, z.imag)))


def _greedy_match_distance(found, reference) -> float:
    """Worst nearest-pair distance after sorting both sets by (real, imag)."""
    if len(found) != len(reference):
        return math.inf
    remaining = list(_sorted_complex(found))
    worst = 0.0
    for ref in _sorted_complex(reference):
        dists = [abs(z - ref) for z in remaining]
        i = int(np.argmin(dists))
        worst = max(worst, dists[i])
        remaining.pop(i)
    return worst


def classify_spectrum(A: np.ndarray, s: int, family: str = "custom") -> SpectrumReport:
    """Split the spectrum of A into zero and nonzero parts and pair the
    nonzero part with the degree-s reference spectrum."""
    A = np.asarray(A, dtype=float)
    k = A.shape[0]
    eigs = eigenvalues(A)
    threshold = ZERO_EIG_REL_TOL * max(1.0, float(np.linalg.norm(A, np.inf)))
    zero = [z for z in eigs if abs(z) <= threshold]
    nonzero = [z for z in eigs if abs(z) > threshold]
    reference = eigenvalues(xs_matrix(s))
    return SpectrumReport(
        k=k,
        s=s,
        family=family,
        eigenvalues=_sorted_complex(eigs),
        zero_count=len(zero),
        nonzero=_sorted_complex(nonzero),
        reference=_sorted_complex(reference),
        max_match_distance=_greedy_match_distance(nonzero, reference),
        zero_threshold=threshold,
    )


def isospectral_check(spec: HbvmSpec, tol: float = 1e-10) -> SpectrumReport:
    """Spectrum classification for the method's stage matrix.

    The report records, rather than hides, any mismatch: zero_count should
    equal k - s and max_match_distance should not exceed tol; use
    SpectrumReport.passes to evaluate both.
    """
    tab = hbvm_tableau(spec)
    return classify_spectrum(tab.A, spec.s, spec.family.value)


def invariant_subspace_residual(spec: HbvmSpec) -> float:
    """Max-norm residual of A P_{s+1} = P_{s+1} Xtilde."""
    sys = abscissae(spec)
    tab = hbvm_tableau(spec)
    bm = basis_matrices(sys, spec.s)
    R = tab.A @ bm.P_s1 - bm.P_s1 @ xtilde_matrix(spec.s)
    return float(np.max(np.abs(R)))


def _full_basis_matrix(sys: AbscissaeSystem) -> np.ndarray:
    return np.column_stack([eval_orthonormal(j, sys.tau) for j in range(1, sys.k + 1)])


def w_transform_check(sys: AbscissaeSystem, s: int) -> tuple[float, float]:
    """Residuals of the two block-structure identities under the enlarged
    basis matrix P (all k basis polynomials at the nodes).

    First: P^T Omega P has the s x s identity in its top-left corner and
    zero off-diagonal blocks.  Second: P^{-1} A P carries xhat_matrix(s) in
    its top-left (s+1) x s block and zeros elsewhere in the first s columns
    and in all trailing k - s columns (for k = s this degenerates to the
    plain s x s similarity).  Gauss and Lobatto weights are exact for the
    basis products involved; weaker custom rules will show genuine residue.
    """
    k = sys.k
    if not 1 <= s <= k:
        raise ValueError("need 1 <= s <= k")
    P = _full_basis_matrix(sys)
    G = P.T @ np.diag(sys.omega) @ P
    E1 = np.zeros_like(G)
    E1[:s, :s] = np.eye(s)
    E1[s:, s:] = G[s:, s:]  # trailing block is unconstrained
    res_gram = float(np.max(np.abs(G - E1)))

    bm = basis_matrices(sys, s)
    A = bm.I_s @ bm.P_s.T @ bm.Omega
    try:
        M = np.linalg.solve(P, A @ P)
    except np.linalg.LinAlgError as exc:
        raise ValueError("enlarged basis matrix is singular") from exc
    E2 = np.zeros((k, k))
    if k == s:
        E2[:, :] = xs_matrix(s)
    else:
        E2[: s + 1, :s] = xhat_matrix(s)
    res_similarity = float(np.max(np.abs(M - E2)))
    return res_gram, res_similarity


def stability_function(tab: ButcherTableau, z: complex) -> complex:
    """Linear-stability value R(z) = 1 + z b^T (I - z A)^{-1} 1."""
    k = tab.k
    M = np.eye(k, dtype=complex) - z * tab.A
    try:
        w = np.linalg.solve(M, np.ones(k, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise PoleError(f"resolvent singular at z = {z}") from exc
    return complex(1.0 + z * np.dot(tab.b, w))


@dataclass(frozen=True)
class StabilityScan:
    """Worst-case stability-function statistics over the sample grids."""

    imag_axis_max_deviation: float
    lhp_max_modulus: float
    poles: tuple[complex, ...] = ()

    @property
    def max_deviation(self) -> float:
        """Single-scalar summary: distance from perfect A-stability."""
        return max(self.imag_axis_max_deviation,
                   max(self.lhp_max_modulus - 1.0, 0.0))


def a_stability_scan(tab: ButcherTableau, n_imag: int = 200,
                     n_lhp: int = 15) -> StabilityScan:
    """Sample |R| on the imaginary axis and in the open left half-plane.

    The imaginary axis uses n_imag log-spaced points with |y| in
    [1e-3, 1e3]; the half-plane grid crosses n_lhp log-spaced negative real
    parts with symmetric log-spaced imaginary parts.
    """
    poles = []
    imag_dev = 0.0
    for y in np.logspace(-3.0, 3.0, n_imag):
        try:
            imag_dev = max(imag_dev, abs(abs(stability_function(tab, 1j * y)) - 1.0))
        except PoleError:
            poles.append(1j * y)
    re = -np.logspace(-3.0, 3.0, n_lhp)
    im_half = np.logspace(-3.0, 3.0, n_lhp)
    im = np.concatenate((-im_half[::-1], [0.0], im_half))
    lhp_max = 0.0
    for x in re:
        for y in im:
            try:
                lhp_max = max(lhp_max, abs(stability_function(tab, complex(x, y))))
            except PoleError:
                poles.append(complex(x, y))
    return StabilityScan(imag_axis_max_deviation=float(imag_dev),
                         lhp_max_modulus=float(lhp_max),
                         poles=tuple(poles))


# ---------------------------------------------------------------------------
# Verification sweep over the (s, k, family) test matrix.


def spec_matrix(smax: int, kmax: int, seed: int = 42):
    """All admissible specs with s <= smax, k <= kmax.

    Gauss for every k >= s, Lobatto when its exactness 2k - 3 reaches
    2s - 1, and three seeded random node sets once k >= 2s keeps their
    interpolatory exactness k - 1 sufficient.
    """
    specs = []
    for s in range(1, smax + 1):
        for k in range(s, kmax + 1):
            specs.append((HbvmSpec(k, s, NodeFamily.GAUSS), None))
            if k >= max(2, s + 1):
                specs.append((HbvmSpec(k, s, NodeFamily.LOBATTO), None))
            if k >= 2 * s:
                for j in range(3):
                    sys = random_custom_system(k, seed + j)
                    specs.append((HbvmSpec(k, s, NodeFamily.CUSTOM,
                                           nodes=tuple(sys.tau)), seed + j))
    return specs


def verification_sweep(smax: int = 4, kmax: int = 10, tol: float = 1e-10,
                       seed: int = 42) -> list[dict]:
    """Run every structural check over the spec matrix.

    Returns one dict per spec, sorted by (s, k, family, seed), with the
    residuals and a 'passed' flag comparing each against tol.  The basis
    transform residuals are only evaluated for Gauss and Lobatto nodes,
    whose quadrature is exact for the basis products the identity needs.
    """
    entries = []
    for spec, used_seed in spec_matrix(smax, kmax, seed):
        sys = abscissae(spec)
        tab = hbvm_tableau(spec)
        report = classify_spectrum(tab.A, spec.s, spec.family.value)
        subspace = invariant_subspace_residual(spec)
        filt = filtered_tableau(sys, spec.s)
        filter_residual = float(np.max(np.abs(filt.A - tab.A)))
        if spec.family is NodeFamily.CUSTOM:
            wres = None
        else:
            wres = w_transform_check(sys, spec.s)
        stab = a_stability_scan(tab)
        checks = [report.passes(tol), subspace <= tol, filter_residual <= tol,
                  stab.max_deviation <= tol]
        if wres is not None:
            checks.append(max(wres) <= tol)
        entries.append({
            "spec": {"k": spec.k, "s": spec.s, "family": spec.family.value,
                     "seed": used_seed},
            "zero_count": report.zero_count,
            "expected_zero_count": spec.k - spec.s,
            "max_match_distance": report.max_match_distance,
            "subspace_residual": subspace,
            "filter_residual": filter_residual,
            "wtransform_residuals": None if wres is None else list(wres),
            "a_stability_max_deviation": stab.max_deviation,
            "passed": all(checks),
        })
    entries.sort(key=lambda e: (e["spec"]["s"], e["spec"]["k"],
                                e["spec"]["family"], e["spec"]["seed"] or 0))
    return entries
