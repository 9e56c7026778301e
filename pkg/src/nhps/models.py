"""Constructors for the model operators and spectral-amplification gadgets.

Covers the non-Hermitian qubit model, Hatano-Nelson chains with either
boundary condition, the Fourier-phase coupling operators, and the
block-companion / unary-clock gadget family used for spectral verification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ResourceError
from .numlin import as_complex_matrix, dagger, eigh, kron, require_hermitian

GADGET_DIM_CAP = 4096

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Qubit raising/lowering in the occupation basis: SIGMA_PLUS |0> = |1>.
SIGMA_PLUS = 0.5 * (PAULI_X - 1j * PAULI_Y)
SIGMA_MINUS = 0.5 * (PAULI_X + 1j * PAULI_Y)
NUMBER_OP = 0.5 * (np.eye(2) - PAULI_Z)


@dataclass(frozen=True)
class HnParams:
    """Hatano-Nelson chain parameters: hopping J +/- gamma on n sites."""

    n: int
    J: float
    gamma: float
    boundary: str = "pbc"

    def __post_init__(self):
        if self.n < 2:
            raise ContractError(f"site count must be >= 2, got {self.n}")
        if self.boundary not in ("obc", "pbc"):
            raise ContractError(f"boundary must be 'obc' or 'pbc', got {self.boundary!r}")


def qubit_model(g: float) -> np.ndarray:
    """2x2 non-Hermitian qubit operator X - i*g*Z = [[-ig, 1], [1, ig]]."""
    return np.array([[-1j * g, 1.0], [1.0, 1j * g]], dtype=complex)


def hatano_nelson(p: HnParams) -> np.ndarray:
    """Asymmetric-hopping chain: (J+gamma) |j+1><j| + (J-gamma) |j><j+1|."""
    H = np.zeros((p.n, p.n), dtype=complex)
    for j in range(p.n - 1):
        H[j + 1, j] = p.J + p.gamma
        H[j, j + 1] = p.J - p.gamma
    if p.boundary == "pbc":
        H[0, p.n - 1] = p.J + p.gamma
        H[p.n - 1, 0] = p.J - p.gamma
    return H


def hn_spectrum_closed_form(p: HnParams) -> np.ndarray:
    """Analytic eigenvalues: a real cosine band (obc) or a centered ellipse (pbc)."""
    if p.boundary == "obc":
        j = np.arange(1, p.n + 1)
        return (2.0 * np.sqrt(complex(p.J**2 - p.gamma**2))
                * np.cos(j * np.pi / (p.n + 1)))
    j = np.arange(p.n)
    ang = 2.0 * np.pi * j / p.n
    return 2.0 * p.J * np.cos(ang) - 2.0j * p.gamma * np.sin(ang)


def qft_matrix(n: int) -> np.ndarray:
    """Discrete Fourier matrix U[j, k] = exp(2*pi*i*j*k/n) / sqrt(n)."""
    if n < 1:
        raise ContractError(f"QFT size must be >= 1, got {n}")
    j = np.arange(n)
    return np.exp(2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)


def hn_couplings(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal phase couplings exp(+/- 2*pi*i*k/n) |k><k|.

    In the Fourier eigenbasis these act as one-step shifts in opposite
    directions, which is what makes the dissipative dynamics tractable.
    """
    if n < 2:
        raise ContractError(f"need n >= 2, got {n}")
    phases = np.exp(2j * np.pi * np.arange(n) / n)
    return np.diag(phases), np.diag(phases.conj())


def reflection_coupling(n: int) -> np.ndarray:
    """Position-reversal operator R = sum_k |n-1-k><k| (an involution).

    The concrete form of the reflection-type coupling is this package's
    choice; runs that use it carry a flag in their output metadata.
    """
    if n < 2:
        raise ContractError(f"need n >= 2, got {n}")
    return np.fliplr(np.eye(n, dtype=complex))


def _require_psd(H: np.ndarray, tol: float = 1e-10) -> None:
    w = eigh(H).values
    if w[0] < -tol:
        raise ContractError(f"matrix must be PSD, min eigenvalue {w[0]:.3e}")


def cyclic_gadget(H, m: int) -> np.ndarray:
    """Block-companion amplifier: identity blocks on the superdiagonal, H in
    the lower-left corner.

    For strictly positive H with eigenvalues mu_j, the Nm x Nm result is
    diagonalizable with eigenvalues exp(2*pi*i*k/m) * mu_j^(1/m); a zero
    eigenvalue of H stays a zero eigenvalue.
    """
    M = require_hermitian(H, name="H")
    _require_psd(M)
    if m < 1:
        raise ContractError(f"cycle length must be >= 1, got {m}")
    N = M.shape[0]
    G = np.zeros((N * m, N * m), dtype=complex)
    for i in range(m - 1):
        G[i * N:(i + 1) * N, (i + 1) * N:(i + 2) * N] = np.eye(N)
    G[(m - 1) * N:, :N] = M
    return G


def mesh_gadget(H, z_list) -> np.ndarray:
    """Block-diagonal operator with blocks H - z_j * I over a real level grid."""
    M = require_hermitian(H, name="H")
    z = np.atleast_1d(np.asarray(z_list, dtype=float))
    if z.size == 0:
        raise ContractError("level grid must be nonempty")
    d = M.shape[0]
    out = np.zeros((d * z.size, d * z.size), dtype=complex)
    for j, zj in enumerate(z):
        out[j * d:(j + 1) * d, j * d:(j + 1) * d] = M - zj * np.eye(d)
    return out


def promise_mesh(a: float, b: float) -> tuple[np.ndarray, float]:
    """Level grid z_j = (b-a)*j/3, j = 1..ceil(3a/(b-a)), and its spacing.

    Covers [0, a] with spacing eps = (b-a)/3 so that any eigenvalue below a
    is within eps of a grid point while eigenvalues above b stay 2*eps away.
    """
    if not (0 <= a < b):
        raise ContractError(f"need 0 <= a < b, got a={a}, b={b}")
    eps = (b - a) / 3.0
    m = max(1, int(np.ceil(3.0 * a / (b - a))))
    return eps * np.arange(1, m + 1), eps


def _embed_qubit_op(op: np.ndarray, site: int, m: int) -> np.ndarray:
    """Single-qubit operator on qubit `site` of an m-qubit register (qubit 0
    is the most significant tensor factor)."""
    out = np.eye(2**site, dtype=complex)
    out = kron(out, op)
    return kron(out, np.eye(2 ** (m - 1 - site), dtype=complex))


def total_number_operator(m: int) -> np.ndarray:
    """Sum of per-qubit occupation number operators on m qubits."""
    total = np.zeros((2**m, 2**m), dtype=complex)
    for site in range(m):
        total += _embed_qubit_op(NUMBER_OP, site, m)
    return total


def _penalty_operator(m: int) -> np.ndarray:
    """(sum_j n_j - 1)^2 on the m-qubit register: zero exactly on one-hot states."""
    shifted = total_number_operator(m) - np.eye(2**m)
    return shifted @ shifted


def _check_gadget_dim(m: int, d: int) -> None:
    if (2**m) * d > GADGET_DIM_CAP:
        raise ResourceError(
            f"gadget dimension 2^{m} * {d} exceeds cap {GADGET_DIM_CAP}")


def clock_gadget(H, z_list, gamma_pen: float) -> np.ndarray:
    """Unary-clock encoding of the level mesh on the full m-qubit ancilla space.

    Builds sum_j n_j (x) (H - z_j) + gamma_pen * (sum_j n_j - 1)^2 (x) I with
    one ancilla qubit per grid point.  Restricted to the one-hot sector it
    reproduces :func:`mesh_gadget`; the zero-excitation sector is gamma_pen
    times the identity and higher sectors are pushed away quadratically.
    """
    M = require_hermitian(H, name="H")
    z = np.atleast_1d(np.asarray(z_list, dtype=float))
    if z.size == 0:
        raise ContractError("level grid must be nonempty")
    m, d = z.size, M.shape[0]
    _check_gadget_dim(m, d)
    out = kron(gamma_pen * _penalty_operator(m), np.eye(d, dtype=complex))
    for j, zj in enumerate(z):
        out += kron(_embed_qubit_op(NUMBER_OP, j, m), M - zj * np.eye(d))
    return out


def hopping_clock_gadget(H, m: int, gamma_pen: float) -> np.ndarray:
    """Hopping-clock encoding of the block-companion amplifier.

    sum_{t=1..m-1} sigma-_t sigma+_{t-1} (x) I + sigma-_0 sigma+_{m-1} (x) H
    plus gamma_pen * (sum_t n_t - 1)^2 (x) I.  Excitation number is
    conserved, the one-hot sector carries the :func:`cyclic_gadget`
    spectrum, and with gamma_pen = hopping_penalty_weight(H, m) every other
    sector has |eigenvalue| >= 1.
    """
    M = as_complex_matrix(H, square=True, name="H")
    if m < 1:
        raise ContractError(f"cycle length must be >= 1, got {m}")
    d = M.shape[0]
    _check_gadget_dim(m, d)
    out = kron(gamma_pen * _penalty_operator(m), np.eye(d, dtype=complex))
    for t in range(1, m):
        hop = _embed_qubit_op(SIGMA_MINUS, t, m) @ _embed_qubit_op(SIGMA_PLUS, t - 1, m)
        out += kron(hop, np.eye(d, dtype=complex))
    wrap = _embed_qubit_op(SIGMA_MINUS, 0, m) @ _embed_qubit_op(SIGMA_PLUS, m - 1, m)
    out += kron(wrap, M)
    return out


def hopping_penalty_weight(H, m: int) -> float:
    """Penalty weight (m - 1) + ||H||_2 + 1 separating non-one-hot sectors."""
    M = as_complex_matrix(H, square=True, name="H")
    return float(m - 1 + np.linalg.norm(M, 2) + 1.0)


def one_hot_isometry(m: int, d: int) -> np.ndarray:
    """Isometry from the clock-position basis (x) C^d into the m-qubit space.

    Column block t maps to the codeword with qubit t excited, so conjugating
    a clock gadget with this isometry recovers its encoded m*d operator.
    """
    S = np.zeros((2**m, m), dtype=complex)
    for t in range(m):
        S[2 ** (m - 1 - t), t] = 1.0
    return kron(S, np.eye(d, dtype=complex))


def sector_isometry(m: int, r: int, d: int) -> np.ndarray:
    """Isometry onto the Hamming-weight-r ancilla sector tensored with C^d."""
    idx = [k for k in range(2**m) if bin(k).count("1") == r]
    S = np.zeros((2**m, len(idx)), dtype=complex)
    for col, k in enumerate(idx):
        S[k, col] = 1.0
    return kron(S, np.eye(d, dtype=complex))


def restrict(op: np.ndarray, isometry: np.ndarray) -> np.ndarray:
    """Compress an operator to the subspace spanned by the isometry columns."""
    return dagger(isometry) @ op @ isometry
