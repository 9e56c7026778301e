"""Dense complex linear algebra kernel used by every other module.

All operators are plain complex ``numpy`` arrays in row-major order.  The
functions here wrap LAPACK (via ``numpy.linalg``) behind the contracts the
rest of the package relies on: ascending singular values, verified
Hermiticity, and explicit failure types.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ContractError, NumericalError

HERMITICITY_TOL = 1e-12
VERIFY_TOL = 1e-10


class SvdResult(NamedTuple):
    """Singular value decomposition A = U @ diag(sigma) @ V^dag.

    ``sigma`` is ascending (smallest singular value first); the columns of
    ``U`` and ``V`` are the matching left/right singular vectors.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray


class EigResult(NamedTuple):
    """Hermitian eigendecomposition with ascending eigenvalues."""

    values: np.ndarray
    vectors: np.ndarray


def dagger(A: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return A.conj().T


def as_complex_matrix(A, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array, raising ContractError otherwise."""
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2:
        raise ContractError(f"{name} must be 2-D, got ndim={M.ndim}")
    if not np.all(np.isfinite(M)):
        raise ContractError(f"{name} contains non-finite entries")
    if square and M.shape[0] != M.shape[1]:
        raise ContractError(f"{name} must be square, got shape {M.shape}")
    return M


def hermiticity_defect(H: np.ndarray) -> float:
    """Largest entrywise deviation |H - H^dag|, normalized by max(1, |H|_max)."""
    scale = max(1.0, float(np.abs(H).max(initial=0.0)))
    return float(np.abs(H - dagger(H)).max(initial=0.0)) / scale


def require_hermitian(H, tol: float = HERMITICITY_TOL, name: str = "matrix") -> np.ndarray:
    M = as_complex_matrix(H, square=True, name=name)
    defect = hermiticity_defect(M)
    if defect > tol:
        raise ContractError(f"{name} is not Hermitian: defect {defect:.3e} > {tol:.1e}")
    return M


def svd(A) -> SvdResult:
    """SVD with ascending singular values (sigma[0] is the smallest)."""
    M = as_complex_matrix(A, name="A")
    try:
        U, s, Vh = np.linalg.svd(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    # LAPACK returns descending order; flip to put sigma_0 first.
    k = len(s)
    return SvdResult(U[:, :k][:, ::-1], s[::-1].copy(), dagger(Vh)[:, ::-1])


def eigh(H) -> EigResult:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    M = require_hermitian(H, name="H")
    try:
        w, V = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigensolve failed: {exc}") from exc
    return EigResult(w, V)


def general_eigvals(A) -> np.ndarray:
    """Eigenvalues of a general (possibly non-Hermitian) square matrix.

    Verification-only helper: spectra of small models and gadgets are
    compared against closed forms with :func:`eig_set_distance`.
    """
    M = as_complex_matrix(A, square=True, name="A")
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration failed: {exc}") from exc


def eig_set_distance(a, b) -> float:
    """Max distance under the optimal pairing of two eigenvalue multisets.

    Sorting complex spectra is ambiguous near ties, so the comparison is a
    minimum-cost bipartite matching on |a_i - b_j|.
    """
    va = np.atleast_1d(np.asarray(a, dtype=complex)).ravel()
    vb = np.atleast_1d(np.asarray(b, dtype=complex)).ravel()
    if va.shape != vb.shape:
        raise ContractError("eigenvalue sets must have equal cardinality")
    cost = np.abs(va[:, None] - vb[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def expm_hermitian(H, t: float) -> np.ndarray:
    """Unitary exp(-i H t) for Hermitian H, via eigendecomposition."""
    w, V = eigh(H)
    return (V * np.exp(-1j * w * t)) @ dagger(V)


def hermitian_dilation(K) -> np.ndarray:
    """Hermitian block matrix [[0, K^dag], [K, 0]] for square K.

    Its eigenvalues are +/- the singular values of K.
    """
    M = as_complex_matrix(K, square=True, name="K")
    d = M.shape[0]
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, d:] = dagger(M)
    out[d:, :d] = M
    return out


def partial_trace_first(M, dim_first: int) -> np.ndarray:
    """Trace out the leading tensor factor of a (dim_first*d) x (dim_first*d) matrix."""
    A = as_complex_matrix(M, square=True, name="M")
    n = A.shape[0]
    if dim_first < 1 or n % dim_first != 0:
        raise ContractError(f"dimension {n} is not divisible by leading factor {dim_first}")
    d = n // dim_first
    return np.einsum("ajak->jk", A.reshape(dim_first, d, dim_first, d))


def kron(A, B) -> np.ndarray:
    """Kronecker product (thin wrapper kept for a uniform kernel surface)."""
    return np.kron(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))
