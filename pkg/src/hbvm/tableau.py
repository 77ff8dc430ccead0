"""Butcher tableau constructors: the energy-preserving k-stage method of
degree s, plain collocation, and the low-rank filtered form, plus the small
structural matrices that carry the Gauss spectrum.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .legendre import (
    AbscissaeSystem,
    NodeFamily,
    custom_system,
    eval_orthonormal,
    exactness_degree,
    gauss_system,
    integral_orthonormal,
    lagrange_partial_integrals,
    lobatto_system,
    xi,
)

__all__ = [
    "MAX_STAGES",
    "MAX_DEGREE",
    "BasisMatrices",
    "ButcherTableau",
    "HbvmSpec",
    "abscissae",
    "basis_matrices",
    "hbvm_tableau",
    "collocation_matrix",
    "filtered_tableau",
    "xs_matrix",
    "xhat_matrix",
    "xtilde_matrix",
    "tableau_to_json",
    "tableau_from_json",
]

# Supported envelope: dense storage and the desk-scale eigensolver cap.
MAX_STAGES = 12
MAX_DEGREE = 6

# Moment tolerance used when enforcing the quadrature-exactness hypothesis.
EXACTNESS_TOL = 1e-9

# Numerical rank cutoff for the constructed stage matrix.
RANK_SV_TOL = 1e-10


@dataclass(frozen=True)
class BasisMatrices:
    """Basis evaluations and integrals on a node system.

    P_s  : (k, s)   values of the first s basis polynomials at the nodes
    P_s1 : (k, s+1) same with one extra column
    I_s  : (k, s)   antiderivatives of the basis from 0 to each node
    Omega: (k, k)   diagonal weight matrix
    """

    P_s: np.ndarray
    P_s1: np.ndarray
    I_s: np.ndarray
    Omega: np.ndarray


@dataclass(frozen=True)
class ButcherTableau:
    """Nodes c, stage matrix A, and weights b of a k-stage implicit method."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    s: int | None = None
    family: str | None = None

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        A = np.asarray(self.A, dtype=float)
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        k = c.size
        if A.shape != (k, k) or b.size != k:
            raise ValueError("inconsistent tableau dimensions")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def k(self) -> int:
        return self.c.size


@dataclass(frozen=True)
class HbvmSpec:
    """Method selector: k stages, polynomial degree s, node family.

    Custom families carry their node list; Gauss and Lobatto generate
    theirs.  Construction refuses k < s and anything past the supported
    k <= 12, s <= 6 envelope.
    """

    k: int
    s: int
    family: NodeFamily = NodeFamily.GAUSS
    nodes: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", NodeFamily(self.family))
        if self.s < 1 or self.k < self.s:
            raise ValueError("need 1 <= s <= k")
        if self.k > MAX_STAGES or self.s > MAX_DEGREE:
            raise ValueError(f"supported envelope is k <= {MAX_STAGES}, s <= {MAX_DEGREE}")
        if self.family is NodeFamily.CUSTOM:
            if self.nodes is None or len(self.nodes) != self.k:
                raise ValueError("custom family requires exactly k nodes")
            object.__setattr__(self, "nodes", tuple(float(t) for t in self.nodes))
        elif self.nodes is not None:
            raise ValueError("nodes are only accepted for the custom family")


def abscissae(spec: HbvmSpec) -> AbscissaeSystem:
    """Node system for a method spec."""
    if spec.family is NodeFamily.GAUSS:
        return gauss_system(spec.k)
    if spec.family is NodeFamily.LOBATTO:
        return lobatto_system(spec.k)
    return custom_system(spec.nodes)


def basis_matrices(sys: AbscissaeSystem, s: int) -> BasisMatrices:
    """Evaluate the basis and its antiderivatives on the node system."""
    if not 1 <= s <= sys.k:
        raise ValueError("need 1 <= s <= k")
    P_s1 = np.column_stack([eval_orthonormal(j, sys.tau) for j in range(1, s + 2)])
    I_s = np.column_stack([integral_orthonormal(j, sys.tau) for j in range(1, s + 1)])
    return BasisMatrices(P_s=P_s1[:, :s], P_s1=P_s1, I_s=I_s, Omega=np.diag(sys.omega))


def _require_exactness(sys: AbscissaeSystem, s: int) -> None:
    # Custom rules are held to their generic exactness k - 1, not to any
    # accidental extra degree a symmetric node set may pick up.
    if sys.family is NodeFamily.CUSTOM and sys.k - 1 < 2 * s - 1:
        raise ValueError(
            "quadrature too weak for B(2s): custom nodes guarantee exactness "
            f"k - 1 = {sys.k - 1} < {2 * s - 1}; need k >= 2s"
        )
    degree = exactness_degree(sys, EXACTNESS_TOL)
    if degree < 2 * s - 1:
        raise ValueError(
            "quadrature too weak for B(2s): "
            f"exactness degree {degree} < {2 * s - 1} for k={sys.k}, s={s}"
        )


def hbvm_tableau(spec: HbvmSpec) -> ButcherTableau:
    """Build the k-stage tableau of degree s: A = I_s P_s^T Omega.

    Requires the node weights to integrate polynomials of degree 2s - 1
    exactly; the stage matrix then has numerical rank s.
    """
    sys = abscissae(spec)
    _require_exactness(sys, spec.s)
    bm = basis_matrices(sys, spec.s)
    A = bm.I_s @ bm.P_s.T @ bm.Omega
    rank = int(np.sum(np.linalg.svd(A, compute_uv=False) > RANK_SV_TOL))
    if rank != spec.s:
        raise RuntimeError(f"stage matrix rank {rank} != s = {spec.s}")
    return ButcherTableau(c=sys.tau, A=A, b=sys.omega, s=spec.s,
                          family=spec.family.value)


def collocation_matrix(sys: AbscissaeSystem) -> np.ndarray:
    """Stage matrix of the k-stage collocation method at the given nodes.

    Entry (i, j) integrates the j-th Lagrange cardinal polynomial from 0 to
    node i; the cardinal integrals are exact for their polynomial degree.
    """
    return lagrange_partial_integrals(sys.tau, sys.tau)


def filtered_tableau(sys: AbscissaeSystem, s: int) -> ButcherTableau:
    """Rank-s filtering of the collocation method: A = (coll) P_s P_s^T Omega."""
    _require_exactness(sys, s)
    bm = basis_matrices(sys, s)
    A = collocation_matrix(sys) @ bm.P_s @ bm.P_s.T @ bm.Omega
    return ButcherTableau(c=sys.tau, A=A, b=sys.omega, s=s,
                          family=sys.family.value)


def xs_matrix(s: int) -> np.ndarray:
    """s x s tridiagonal matrix carrying the order-2s Gauss spectrum."""
    if s < 1:
        raise ValueError("s must be >= 1")
    X = np.zeros((s, s))
    X[0, 0] = 0.5
    for j in range(1, s):
        X[j - 1, j] = -xi(j)
        X[j, j - 1] = xi(j)
    return X


def xhat_matrix(s: int) -> np.ndarray:
    """(s+1) x s extension of xs_matrix with a final row (0, ..., 0, xi(s))."""
    X = np.zeros((s + 1, s))
    X[:s, :] = xs_matrix(s)
    X[s, s - 1] = xi(s)
    return X


def xtilde_matrix(s: int) -> np.ndarray:
    """xhat_matrix with an appended zero column, (s+1) x (s+1)."""
    X = np.zeros((s + 1, s + 1))
    X[:, :s] = xhat_matrix(s)
    return X


# ---------------------------------------------------------------------------
# JSON serialisation.  Reals are written with 17 significant digits so files
# round-trip float64 exactly.


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def tableau_to_json(tab: ButcherTableau) -> str:
    """Serialise a tableau; ends with a newline."""
    rows = ",\n    ".join(
        "[" + ", ".join(_fmt(v) for v in row) + "]" for row in tab.A
    )
    parts = [
        f'"k": {tab.k}',
        f'"s": {"null" if tab.s is None else tab.s}',
        f'"family": {json.dumps(tab.family)}',
        '"c": [' + ", ".join(_fmt(v) for v in tab.c) + "]",
        '"b": [' + ", ".join(_fmt(v) for v in tab.b) + "]",
        '"A": [\n    ' + rows + "\n  ]",
    ]
    return "{\n  " + ",\n  ".join(parts) + "\n}\n"


def tableau_from_json(text: str) -> ButcherTableau:
    """Parse a tableau serialised by tableau_to_json."""
    obj = json.loads(text)
    tab = ButcherTableau(c=obj["c"], A=obj["A"], b=obj["b"],
                         s=obj.get("s"), family=obj.get("family"))
    if tab.k != obj["k"]:
        raise ValueError("declared k does not match array sizes")
    return tab
