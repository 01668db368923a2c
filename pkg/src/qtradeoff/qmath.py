"""Fixed-size complex linear algebra for one- and two-qubit operators.

All operators are plain numpy arrays: 2x2 for single-qubit objects and 4x4
for two-qubit objects.  numpy is used for array arithmetic only; the
Hermitian eigensolver is self-contained (a closed-form solve at size 2 and
a cyclic complex Jacobi iteration at size 4), so no general-purpose
eigenvalue routine is required.

Tensor index convention: the first factor is the slow index, i.e.
``tensor(a, b)[(i, k), (j, l)] == a[i, j] * b[k, l]`` with the pair
``(i, k)`` flattened row-major to ``2 * i + k``.  This matches ``np.kron``.

Inputs are never mutated and returned arrays are freshly allocated, so
every function here is a pure function and safe to call from any number of
threads concurrently.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "ID2",
    "ID4",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "FLIP",
    "NotHermitian",
    "HERMITICITY_RTOL",
    "dag",
    "tensor",
    "partial_trace",
    "herm_eigvals",
    "trace_norm",
]

ID2 = np.eye(2, dtype=complex)
ID4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Two-qubit flip (swap) operator: FLIP @ (a kron b) @ FLIP == b kron a.
FLIP = np.zeros((4, 4), dtype=complex)
for _i in range(2):
    for _j in range(2):
        FLIP[2 * _j + _i, 2 * _i + _j] = 1.0
del _i, _j

# Relative Hermiticity tolerance: ||m - m^dag||_F <= HERMITICITY_RTOL * ||m||_F.
HERMITICITY_RTOL = 1e-10

_JACOBI_OFF_TOL = 1e-13
_JACOBI_MAX_SWEEPS = 60


class NotHermitian(ValueError):
    """Raised when an operation that needs a Hermitian matrix gets none."""


def _as_matrix(m, name="matrix"):
    a = np.asarray(m, dtype=complex)
    if a.shape not in ((2, 2), (4, 4)):
        raise ValueError(f"{name} must be 2x2 or 4x4, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(np.float64))):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def dag(m):
    """Hermitian adjoint m^dag."""
    return np.asarray(m).conj().T


def tensor(a, b):
    """Tensor (Kronecker) product of two 2x2 matrices, first factor slow."""
    a = _as_matrix(a, "a")
    b = _as_matrix(b, "b")
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError("tensor expects two 2x2 matrices")
    return np.kron(a, b)


def partial_trace(m, which="second"):
    """Trace out one tensor factor of a 4x4 two-qubit operator.

    ``which`` selects the factor that is traced over: ``"first"`` leaves
    the second qubit, ``"second"`` leaves the first.  The total trace is
    preserved.
    """
    a = _as_matrix(m, "m")
    if a.shape != (4, 4):
        raise ValueError(f"partial_trace expects a 4x4 matrix, got {a.shape}")
    r = a.reshape(2, 2, 2, 2)
    if which == "second":
        return np.einsum("ikjk->ij", r)
    if which == "first":
        return np.einsum("kikj->ij", r)
    raise ValueError(f"which must be 'first' or 'second', got {which!r}")


def _check_hermitian(a, name):
    dev = np.linalg.norm(a - a.conj().T)
    scale = np.linalg.norm(a)
    # Relative tolerance, with an absolute floor so matrices that are pure
    # rounding noise (e.g. a channel difference that is analytically zero)
    # still count as Hermitian.
    if dev > max(HERMITICITY_RTOL * scale, 1e-14):
        raise NotHermitian(
            f"{name} is not Hermitian: ||m - m^dag|| = {dev:.3e} "
            f"exceeds {HERMITICITY_RTOL:.0e} * ||m|| = {HERMITICITY_RTOL * scale:.3e}"
        )


def _eigvals2(h):
    # Closed-form spectrum of a 2x2 Hermitian matrix.
    a = h[0, 0].real
    d = h[1, 1].real
    mid = 0.5 * (a + d)
    r = np.hypot(0.5 * (a - d), abs(h[0, 1]))
    return np.array([mid + r, mid - r])


def _offdiag_norm(a):
    off = a - np.diag(np.diag(a))
    return np.linalg.norm(off)


def _jacobi_eigvals(h):
    # Cyclic complex Jacobi iteration; robust at this fixed tiny size.
    a = h.copy()
    n = a.shape[0]
    tol = _JACOBI_OFF_TOL * max(1.0, np.linalg.norm(a))
    for _ in range(_JACOBI_MAX_SWEEPS):
        if _offdiag_norm(a) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                b = abs(apq)
                if b < 1e-300:
                    continue
                phase = apq / b
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * b)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # Unitary rotation with block [[c, s*phase], [-s*conj(phase), c]]
                # on rows/columns (p, q); chosen to zero a[p, q].
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * np.conj(phase) * col_q
                a[:, q] = s * phase * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * np.conj(phase) * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    else:
        raise RuntimeError("Jacobi iteration failed to converge")
    return np.real(np.diag(a))


def herm_eigvals(m):
    """Eigenvalues of a Hermitian 2x2 or 4x4 matrix, sorted descending.

    The input must be Hermitian to within ``HERMITICITY_RTOL`` (relative,
    Frobenius norm); it is symmetrized as (m + m^dag)/2 before solving to
    suppress accumulated rounding.  Raises :class:`NotHermitian` otherwise.
    """
    a = _as_matrix(m, "m")
    _check_hermitian(a, "m")
    h = 0.5 * (a + a.conj().T)
    if h.shape == (2, 2):
        vals = _eigvals2(h)
    else:
        vals = _jacobi_eigvals(h)
    return np.sort(vals)[::-1]


def trace_norm(m):
    """Trace norm ||m||_1 of a Hermitian matrix: sum of |eigenvalues|."""
    return float(np.sum(np.abs(herm_eigvals(m))))
