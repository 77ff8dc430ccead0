"""Dense real eigensolver for matrices up to 12 x 12.

Pipeline: diagonal balancing, Householder reduction to Hessenberg form,
then implicit double-shift QR iteration in real arithmetic.  Complex pairs
are extracted from trailing 2 x 2 blocks at deflation time, so the main
loop never touches complex numbers.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["EigenConvergenceError", "eigenvalues"]

_EPS = float(np.finfo(float).eps)
MAX_ORDER = 12


class EigenConvergenceError(RuntimeError):
    """QR iteration exceeded its sweep budget without full deflation."""


def _balance(A: np.ndarray) -> np.ndarray:
    # Diagonal similarity scaling by powers of 2 until row and column
    # norms roughly agree (EISPACK-style, no permutation step).
    A = A.copy()
    n = A.shape[0]
    radix = 2.0
    converged = False
    while not converged:
        converged = True
        for i in range(n):
            r = np.sum(np.abs(A[i, :])) - abs(A[i, i])
            c = np.sum(np.abs(A[:, i])) - abs(A[i, i])
            if r == 0.0 or c == 0.0:
                continue
            f = 1.0
            s = c + r
            while c < r / radix:
                c *= radix
                r /= radix
                f *= radix
            while c > r * radix:
                c /= radix
                r *= radix
                f /= radix
            if (c + r) < 0.95 * s:
                converged = False
                A[i, :] /= f
                A[:, i] *= f
    return A


def _householder_unit(v: np.ndarray):
    # Unit vector u with (I - 2 u u^T) v = +-|v| e1, or None if v is
    # already in that form.
    norm = math.sqrt(float(np.dot(v, v)))
    if norm == 0.0 or np.all(v[1:] == 0.0):
        return None
    u = v.astype(float).copy()
    u[0] += math.copysign(norm, v[0])
    return u / math.sqrt(float(np.dot(u, u)))


def _hessenberg(A: np.ndarray) -> np.ndarray:
    H = A.copy()
    n = H.shape[0]
    for j in range(n - 2):
        u = _householder_unit(H[j + 1:, j])
        if u is None:
            continue
        H[j + 1:, j:] -= 2.0 * np.outer(u, u @ H[j + 1:, j:])
        H[:, j + 1:] -= 2.0 * np.outer(H[:, j + 1:] @ u, u)
        H[j + 2:, j] = 0.0
    return H


def _eig2(a, b, c, d):
    # Eigenvalues of [[a, b], [c, d]] with a stable discriminant split.
    mid = 0.5 * (a + d)
    disc = (0.5 * (a - d)) ** 2 + b * c
    if disc >= 0.0:
        sq = math.sqrt(disc)
        lam1 = mid + sq if mid >= 0.0 else mid - sq
        det = a * d - b * c
        lam2 = det / lam1 if lam1 != 0.0 else mid - math.copysign(sq, mid)
        return [complex(lam1), complex(lam2)]
    sq = math.sqrt(-disc)
    return [complex(mid, sq), complex(mid, -sq)]


def _francis_sweep(H, lo, hi, tr, det):
    # One implicit double-shift sweep on the active window [lo, hi]; the
    # shift pair is encoded by its sum tr and product det.
    x = H[lo, lo]
    y = H[lo + 1, lo]
    v = np.array([
        x * x + H[lo, lo + 1] * y - tr * x + det,
        y * (x + H[lo + 1, lo + 1] - tr),
        y * H[lo + 2, lo + 1],
    ])
    for i in range(lo, hi - 1):
        u = _householder_unit(v)
        if u is not None:
            c0 = max(lo, i - 1)
            rows = slice(i, i + 3)
            H[rows, c0:] -= 2.0 * np.outer(u, u @ H[rows, c0:])
            r1 = min(hi, i + 3)
            H[: r1 + 1, rows] -= 2.0 * np.outer(H[: r1 + 1, rows] @ u, u)
        if i > lo:
            H[i + 1: i + 3, i - 1] = 0.0
        if i < hi - 2:
            v = H[i + 1: i + 4, i].copy()
        else:
            break
    u = _householder_unit(H[hi - 1: hi + 1, hi - 2].copy())
    if u is not None:
        rows = slice(hi - 1, hi + 1)
        H[rows, hi - 2:] -= 2.0 * np.outer(u, u @ H[rows, hi - 2:])
        H[: hi + 1, rows] -= 2.0 * np.outer(H[: hi + 1, rows] @ u, u)
    H[hi, hi - 2] = 0.0


def _qr_eigenvalues(H: np.ndarray) -> list[complex]:
    n = H.shape[0]
    hnorm = float(np.linalg.norm(H, np.inf))
    if hnorm == 0.0:
        return [0j] * n
    eigs: list[complex] = []
    hi = n - 1
    sweeps = 0
    budget = 30 * n
    since_deflation = 0
    while hi >= 0:
        if hi == 0:
            eigs.append(complex(H[0, 0]))
            break
        # Find the start of the active unreduced block.
        lo = hi
        while lo > 0:
            thr = _EPS * max(abs(H[lo - 1, lo - 1]) + abs(H[lo, lo]), hnorm)
            if abs(H[lo, lo - 1]) <= thr:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs.append(complex(H[hi, hi]))
            hi -= 1
            since_deflation = 0
            continue
        if lo == hi - 1:
            eigs.extend(_eig2(H[lo, lo], H[lo, hi], H[hi, lo], H[hi, hi]))
            hi -= 2
            since_deflation = 0
            continue
        sweeps += 1
        since_deflation += 1
        if sweeps > budget:
            raise EigenConvergenceError(
                f"no convergence after {budget} double-shift sweeps")
        if since_deflation % 11 == 0:
            # Exceptional real double shift to break symmetric stalls.
            val = H[hi, hi] + 0.75 * abs(H[hi, hi - 1])
            tr, det = 2.0 * val, val * val
        else:
            # Shift pair: the eigenvalues of the trailing 2 x 2 block.
            tr = H[hi - 1, hi - 1] + H[hi, hi]
            det = (H[hi - 1, hi - 1] * H[hi, hi]
                   - H[hi - 1, hi] * H[hi, hi - 1])
        _francis_sweep(H, lo, hi, tr, det)
    return eigs


def eigenvalues(M) -> np.ndarray:
    """All eigenvalues of a real square matrix, sorted by (real, imag).

    Raises EigenConvergenceError if the QR iteration does not deflate the
    whole matrix within 30 n double-shift sweeps.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    n = M.shape[0]
    if n > MAX_ORDER:
        raise ValueError(f"supported matrix order is <= {MAX_ORDER}")
    if n == 0:
        return np.empty(0, dtype=complex)
    if n == 1:
        return np.array([complex(M[0, 0])])
    H = _hessenberg(_balance(M))
    eigs = _qr_eigenvalues(H)
    return np.array(sorted(eigs, key=lambda z: (z.real, z.imag)))
