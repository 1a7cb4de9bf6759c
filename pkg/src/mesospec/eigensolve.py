"""Dense symmetric eigenvalues and an independent complex-resolvent oracle.

The production path is Householder reduction to tridiagonal form (LAPACK
dsytrd) followed by an implicit-shift QL iteration with Wilkinson shifts,
eigenvalues only. The resolvent oracle computes Tr (A - z)^-1 / N by direct
complex Gaussian elimination with partial pivoting and shares no code with
the eigensolver; it exists to cross-check the smoothed-density identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.linalg import lapack

MACHINE_EPS = float(np.finfo(np.float64).eps)

# stability budgets for the spectrum invariants (trace / Frobenius identities)
INVARIANT_RTOL = 1e-10
TRIDIAG_TRACE_RTOL = 1e-12

DEFAULT_MAX_SWEEPS = 30
DEFAULT_ORACLE_CAP = 128


class EigensolveError(RuntimeError):
    """QL iteration failed to converge or a spectrum invariant was violated."""


class SingularPivotError(RuntimeError):
    """Zero pivot in the complex elimination; fatal (should not occur off axis)."""


@dataclass
class SpectrumSample:
    """All eigenvalues of one realization, sorted ascending."""

    eigenvalues: np.ndarray
    source_spec: object = None
    solver_iterations: int = 0

    @property
    def N(self) -> int:
        return len(self.eigenvalues)


def _check_symmetric(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix is not exactly symmetric")
    return a


def tridiagonalize(a: np.ndarray):
    """Householder reduction of symmetric ``a`` to tridiagonal (d, e).

    The returned tridiagonal matrix is orthogonally similar to ``a``; the
    trace is preserved to rounding. Backed by LAPACK dsytrd.
    """
    a = _check_symmetric(a)
    n = a.shape[0]
    if n == 1:
        return a.diagonal().copy(), np.zeros(0)
    _, d, e, _, info = lapack.dsytrd(a, lower=1)
    if info != 0:
        raise EigensolveError(f"dsytrd failed with info={info}")
    return d.astype(float, copy=True), e.astype(float, copy=True)


@njit(cache=True, nogil=True)
def _tqli(d, e, max_sweeps):  # pragma: no cover - exercised via wrapper
    """Implicit-shift QL on a symmetric tridiagonal, eigenvalues only.

    Returns (fail_index, total_sweeps); fail_index -1 means success and d
    holds the (unsorted) eigenvalues. An off-diagonal deflates when
    |e_i| <= eps (|d_i| + |d_i+1|) + eps * radius, where radius is a
    Gershgorin bound on the spectral radius: the absolute floor keeps exact
    null clusters (rank-deficient input) from stalling the relative test
    while staying inside the eps * spectral-radius accuracy budget.
    """
    n = d.shape[0]
    eps = 2.220446049250313e-16
    total = 0
    if n == 1:
        return -1, total
    ee = np.zeros(n, dtype=np.float64)
    ee[: n - 1] = e
    radius = 0.0
    for i in range(n):
        row = abs(d[i])
        if i > 0:
            row += abs(ee[i - 1])
        if i < n - 1:
            row += abs(ee[i])
        if row > radius:
            radius = row
    floor = eps * radius
    for l in range(n):
        n_iter = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(ee[m]) <= eps * dd + floor:
                    break
                m += 1
            if m == l:
                break
            n_iter += 1
            total += 1
            if n_iter > max_sweeps:
                return l, total
            # Wilkinson shift from the leading 2x2 of the active block
            g = (d[l + 1] - d[l]) / (2.0 * ee[l])
            r = np.hypot(g, 1.0)
            sign_r = r if g >= 0.0 else -r
            g = d[m] - d[l] + ee[l] / (g + sign_r)
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * ee[i]
                b = c * ee[i]
                r = np.hypot(f, g)
                ee[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    ee[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if underflow:
                continue
            d[l] -= p
            ee[l] = g
            ee[m] = 0.0
    return -1, total


def _eigenvalues_with_sweeps(d, e, max_sweeps):
    vals = np.asarray(d, dtype=float).copy()
    off = np.asarray(e, dtype=float).copy()
    if len(off) != max(len(vals) - 1, 0):
        raise ValueError(f"off-diagonal length {len(off)} does not match diagonal {len(vals)}")
    if max_sweeps < 1:
        raise ValueError(f"max_sweeps must be >= 1, got {max_sweeps}")
    fail, sweeps = _tqli(vals, off, max_sweeps)
    if fail >= 0:
        raise EigensolveError(
            f"eigenvalue {fail} failed to deflate within {max_sweeps} sweeps"
        )
    vals.sort()
    return vals, sweeps


def eigenvalues_tridiagonal(d, e, max_sweeps: int = DEFAULT_MAX_SWEEPS) -> np.ndarray:
    """All eigenvalues of the symmetric tridiagonal (d, e), sorted ascending."""
    vals, _ = _eigenvalues_with_sweeps(d, e, max_sweeps)
    return vals


def spectrum(a: np.ndarray, source_spec=None, max_sweeps: int = DEFAULT_MAX_SWEEPS) -> SpectrumSample:
    """Full spectrum of a dense symmetric matrix, with invariant checks.

    Checks the trace and Frobenius identities against the stability budget
    and raises EigensolveError if either fails; both are backward-stability
    canaries, not tolerances to tune.
    """
    a = _check_symmetric(a)
    d, e = tridiagonalize(a)
    vals, sweeps = _eigenvalues_with_sweeps(d, e, max_sweeps)
    n = a.shape[0]
    scale = float(np.abs(a).max())
    trace_err = abs(vals.sum() - np.trace(a))
    if trace_err > INVARIANT_RTOL * n * scale:
        raise EigensolveError(f"trace identity violated: error {trace_err:.3e}")
    frob_err = abs((vals**2).sum() - (a**2).sum())
    if frob_err > INVARIANT_RTOL * n * scale * scale:
        raise EigensolveError(f"Frobenius identity violated: error {frob_err:.3e}")
    return SpectrumSample(eigenvalues=vals, source_spec=source_spec, solver_iterations=sweeps)


def resolvent_trace_oracle(a: np.ndarray, z: complex, cap: int = DEFAULT_ORACLE_CAP) -> complex:
    """Tr (A - z I)^-1 / N by complex Gaussian elimination, Im z > 0.

    Deliberately independent of the eigensolver (no LAPACK, no shared code);
    O(N^3) per point, hence the size cap. Raises SingularPivotError on a zero
    pivot, which cannot occur off the real axis except through pathological
    rounding and is treated as fatal.
    """
    a = _check_symmetric(a)
    z = complex(z)
    if z.imag <= 0:
        raise ValueError(f"oracle requires Im z > 0, got z = {z}")
    n = a.shape[0]
    if n > cap:
        raise ValueError(f"oracle cap exceeded: N = {n} > {cap}")
    b = a.astype(complex)
    b[np.diag_indices(n)] -= z
    perm = np.arange(n)
    # in-place LU with partial pivoting
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(b[k:, k])))
        if b[p, k] == 0:
            raise SingularPivotError(f"zero pivot at column {k}")
        if p != k:
            b[[k, p]] = b[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        b[k + 1 :, k] /= b[k, k]
        b[k + 1 :, k + 1 :] -= np.outer(b[k + 1 :, k], b[k, k + 1 :])
    if b[n - 1, n - 1] == 0:
        raise SingularPivotError(f"zero pivot at column {n - 1}")
    # solve L y = P I, then U x = y, all right-hand sides at once
    x = np.eye(n, dtype=complex)[perm]
    for k in range(1, n):
        x[k] -= b[k, :k] @ x[:k]
    for k in range(n - 1, -1, -1):
        x[k] -= b[k, k + 1 :] @ x[k + 1 :]
        x[k] /= b[k, k]
    return complex(np.trace(x) / n)
