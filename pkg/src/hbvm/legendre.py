"""Orthonormal shifted-Legendre basis on [0, 1] and quadrature node systems.

The basis is indexed from 1: the j-th member has degree j - 1 and unit L2
norm on [0, 1].  Everything downstream (tableau construction, spectral
checks) is built on these evaluations, their exact antiderivatives, and
Gauss / Lobatto / custom interpolatory quadrature rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "NodeFamily",
    "AbscissaeSystem",
    "RootConvergenceError",
    "eval_orthonormal",
    "integral_orthonormal",
    "xi",
    "gauss_system",
    "lobatto_system",
    "custom_system",
    "random_custom_system",
    "interpolatory_weights",
    "lagrange_basis_values",
    "lagrange_partial_integrals",
    "exactness_degree",
]

# Unit-sum check on quadrature weights at construction time.
WEIGHT_SUM_TOL = 1e-12


class NodeFamily(str, Enum):
    GAUSS = "gauss"
    LOBATTO = "lobatto"
    CUSTOM = "custom"


class RootConvergenceError(RuntimeError):
    """Newton iteration for quadrature nodes failed to converge."""


@dataclass(frozen=True)
class AbscissaeSystem:
    """k quadrature nodes tau on [0, 1] with weights omega summing to 1.

    Nodes are strictly increasing and positive, except that the Lobatto
    family includes the endpoint 0.
    """

    tau: np.ndarray
    omega: np.ndarray
    family: NodeFamily

    def __post_init__(self):
        tau = np.atleast_1d(np.asarray(self.tau, dtype=float))
        omega = np.atleast_1d(np.asarray(self.omega, dtype=float))
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "omega", omega)
        if tau.ndim != 1 or tau.shape != omega.shape:
            raise ValueError("tau and omega must be 1-d arrays of equal length")
        if np.any(np.diff(tau) <= 0):
            raise ValueError("nodes must be strictly increasing")
        low = 0.0 if self.family is NodeFamily.LOBATTO else np.nextafter(0.0, 1.0)
        if tau[0] < low or tau[-1] > 1.0:
            raise ValueError("nodes must lie in (0, 1] (Lobatto may include 0)")
        if abs(math.fsum(omega) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError("weights must sum to 1")

    @property
    def k(self) -> int:
        return self.tau.size


def eval_orthonormal(j: int, t):
    """Evaluate the j-th orthonormal shifted-Legendre polynomial at t.

    Three-term recurrence, starting from the constant 1 and sqrt(3)(2t - 1).
    Accepts a scalar or an ndarray in [0, 1].
    """
    _check_index(j)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0) or np.any(t_arr > 1.0):
        raise ValueError("t must lie in [0, 1]")
    x = 2.0 * t_arr - 1.0
    p_prev = np.ones_like(t_arr)
    if j == 1:
        return p_prev if t_arr.ndim else float(p_prev)
    p_cur = math.sqrt(3.0) * x
    for m in range(1, j - 1):
        a = (2 * m + 1) / (m + 1) * math.sqrt((2 * m + 3) / (2 * m + 1))
        b = m / (m + 1) * math.sqrt((2 * m + 3) / (2 * m - 1))
        p_prev, p_cur = p_cur, a * x * p_cur - b * p_prev
    return p_cur if t_arr.ndim else float(p_cur)


def integral_orthonormal(j: int, c):
    """Exact antiderivative of the j-th basis polynomial from 0 to c.

    Closed form in terms of neighbouring basis values: the integral of the
    first polynomial is c itself, and for j >= 2 it telescopes to
    xi(j) P_{j+1}(c) - xi(j-1) P_{j-1}(c).  No quadrature is involved, so
    tableau entries built from this are exact to rounding.
    """
    _check_index(j)
    c_arr = np.asarray(c, dtype=float)
    if np.any(c_arr < 0.0) or np.any(c_arr > 1.0):
        raise ValueError("c must lie in [0, 1]")
    if j == 1:
        out = 0.5 * eval_orthonormal(1, c) + xi(1) * eval_orthonormal(2, c)
    else:
        out = xi(j) * eval_orthonormal(j + 1, c) - xi(j - 1) * eval_orthonormal(j - 1, c)
    return out


def xi(j: int) -> float:
    """Off-diagonal coupling coefficient 1 / (2 sqrt((2j+1)(2j-1)))."""
    _check_index(j)
    return 1.0 / (2.0 * math.sqrt((2 * j + 1) * (2 * j - 1)))


def _check_index(j: int) -> None:
    if not isinstance(j, (int, np.integer)) or j < 1:
        raise ValueError(f"basis index must be an integer >= 1, got {j!r}")


# ---------------------------------------------------------------------------
# Node systems.  Root finding runs on [-1, 1] with classical (unnormalised)
# Legendre polynomials, then maps to [0, 1].


def _legendre_value_and_derivative(n: int, x: np.ndarray):
    """Values of P_n, P_{n-1} and P_n' on [-1, 1] (classical normalisation).

    The derivative entry is only meaningful away from the endpoints; it is
    set to 0 there (callers never use it at |x| = 1).
    """
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    for m in range(1, n + 1):
        p_prev, p = p, ((2 * m - 1) * x * p - (m - 1) * p_prev) / m
    den = 1.0 - x * x
    with np.errstate(divide="ignore", invalid="ignore"):
        dp = np.where(den != 0.0, n * (p_prev - x * p) / den, 0.0)
    return p, p_prev, dp


def _newton_nodes(guess, fun, max_iter: int = 100, step_tol: float = 1e-15):
    """Vectorised Newton iteration; fun(x) returns (residual, derivative)."""
    x = np.array(guess, dtype=float)
    for _ in range(max_iter):
        f, df = fun(x)
        step = f / df
        x -= step
        if np.max(np.abs(step)) <= step_tol:
            return x
    raise RootConvergenceError("node iteration did not converge in "
                               f"{max_iter} steps")


def gauss_system(k: int) -> AbscissaeSystem:
    """Gauss-Legendre nodes and weights on [0, 1]; exact through degree 2k-1."""
    if k < 1:
        raise ValueError("gauss_system requires k >= 1")
    # Chebyshev-based initial guesses, descending in x.
    i = np.arange(1, k + 1)
    guess = np.cos(np.pi * (4 * i - 1) / (4 * k + 2))

    def residual(x):
        p, _, dp = _legendre_value_and_derivative(k, x)
        return p, dp

    x = _newton_nodes(guess, residual)
    p, _, dp = _legendre_value_and_derivative(k, x)
    if np.max(np.abs(p)) > 1e-12:
        raise RootConvergenceError("Gauss node residual above tolerance")
    tau = np.sort((x + 1.0) / 2.0)
    # Standard derivative formula mapped to [0, 1]; the shifted-polynomial
    # derivative is 2 P_k'(x), so omega = 1 / (tau (1 - tau) (2 P_k')^2).
    _, _, dp = _legendre_value_and_derivative(k, 2.0 * tau - 1.0)
    omega = 1.0 / (tau * (1.0 - tau) * (2.0 * dp) ** 2)
    return AbscissaeSystem(tau, omega, NodeFamily.GAUSS)


def lobatto_system(k: int) -> AbscissaeSystem:
    """Lobatto nodes on [0, 1] including both endpoints; exact through 2k-3."""
    if k < 2:
        raise ValueError("lobatto_system requires k >= 2")
    n = k - 1
    if k == 2:
        x = np.array([-1.0, 1.0])
    else:
        # Interior nodes are the roots of P_{k-1}'; start from Chebyshev
        # extrema and iterate on the derivative.
        guess = np.cos(np.pi * np.arange(1, k - 1) / n)

        def residual(x):
            p, _, dp = _legendre_value_and_derivative(n, x)
            ddp = (2.0 * x * dp - n * (n + 1) * p) / (1.0 - x * x)
            return dp, ddp

        interior = _newton_nodes(guess, residual)
        _, _, dp = _legendre_value_and_derivative(n, interior)
        if np.max(np.abs(dp)) > 1e-11:
            raise RootConvergenceError("Lobatto node residual above tolerance")
        x = np.concatenate(([-1.0], np.sort(interior), [1.0]))
    tau = (x + 1.0) / 2.0
    p, _, _ = _legendre_value_and_derivative(n, x)
    omega = 1.0 / (k * n * p ** 2)
    return AbscissaeSystem(tau, omega, NodeFamily.LOBATTO)


def custom_system(nodes) -> AbscissaeSystem:
    """Wrap user-supplied nodes in (0, 1] with interpolatory weights."""
    tau = np.sort(np.asarray(nodes, dtype=float))
    omega = interpolatory_weights(tau)
    return AbscissaeSystem(tau, omega, NodeFamily.CUSTOM)


def random_custom_system(k: int, seed: int) -> AbscissaeSystem:
    """Seeded random node set: one node jittered inside each of k bins.

    The jitter keeps a minimum separation of 0.6/k, so the Lagrange-basis
    expansions stay well conditioned up to the supported stage counts.
    """
    rng = np.random.default_rng(seed)
    i = np.arange(1, k + 1)
    tau = (i - 0.5 + 0.4 * (rng.random(k) - 0.5)) / k
    return custom_system(tau)


def lagrange_basis_values(tau, x) -> np.ndarray:
    """Cardinal-polynomial values L[i, j] = ell_j(x[i]) in product form."""
    tau = np.asarray(tau, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = tau.size
    if np.unique(tau).size != k:
        raise ValueError("nodes must be pairwise distinct")
    L = np.ones((x.size, k))
    for j in range(k):
        for i in range(k):
            if i != j:
                L[:, j] *= (x - tau[i]) / (tau[j] - tau[i])
    return L


def lagrange_partial_integrals(tau, uppers) -> np.ndarray:
    """Integrals of each cardinal polynomial from 0 to every upper limit.

    Row r holds (integral of ell_j from 0 to uppers[r]) for j = 1..k.  Each
    integral is a Gauss rule of more than sufficient order mapped onto
    [0, upper], so it is exact for the degree k-1 integrand; the product
    form of the cardinal polynomials keeps the evaluation well conditioned
    where monomial expansion is not.
    """
    tau = np.asarray(tau, dtype=float)
    uppers = np.atleast_1d(np.asarray(uppers, dtype=float))
    rule = gauss_system(tau.size // 2 + 2)
    out = np.empty((uppers.size, tau.size))
    for r, upper in enumerate(uppers):
        L = lagrange_basis_values(tau, upper * rule.tau)
        out[r] = upper * (rule.omega @ L)
    return out


def interpolatory_weights(tau) -> np.ndarray:
    """Weights integrating the Lagrange basis over [0, 1]; exact for k-1."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0.0) or np.any(tau > 1.0):
        raise ValueError("nodes must lie in [0, 1]")
    return lagrange_partial_integrals(tau, 1.0)[0]


def exactness_degree(sys: AbscissaeSystem, tol: float = 1e-9) -> int:
    """Largest d with all monomial moments up to d reproduced within tol.

    Scans e = 0, 1, ... up to 2k + 2 and stops at the first failure of
    |sum omega tau^e - 1/(e+1)| <= tol.  Returns -1 if even e = 0 fails.
    """
    degree = -1
    for e in range(2 * sys.k + 3):
        moment = math.fsum(sys.omega * sys.tau ** e)
        if abs(moment - 1.0 / (e + 1)) > tol:
            break
        degree = e
    return degree
