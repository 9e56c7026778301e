"""Dissipative preparation of ground right singular vectors.

The continuous-time generator pairs a Hermitian drift H_z with jump
operators synthesized in its energy basis so that only energy-lowering
transitions survive; the ground space of H_z is then stationary.  What runs
in practice is a discrete-time channel: one Hamiltonian-conjugation step
followed by a Stinespring-dilated dissipative rotation with angle sqrt(tau)
per jump.  The ground space stays exactly fixed for every step size.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ContractError, NumericalError, ResourceError
from .models import HnParams, PAULI_X, hatano_nelson, hn_couplings, qubit_model, reflection_coupling
from .numlin import (
    as_complex_matrix,
    dagger,
    eigh,
    expm_hermitian,
    hermitian_dilation,
    kron,
    partial_trace_first,
    require_hermitian,
)

DENSITY_TOL = 1e-10
STATE_DRIFT_LIMIT = 1e-6
DILATION_DIM_CAP = 4096


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

def require_density(rho, tol: float = DENSITY_TOL) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, PSD (all to tol)."""
    M = require_hermitian(rho, tol=tol, name="rho")
    tr = np.trace(M)
    if abs(tr - 1.0) > tol:
        raise ContractError(f"state trace {tr:.12g} deviates from 1 beyond {tol:.1e}")
    w = np.linalg.eigvalsh(M)
    if w[0] < -tol:
        raise ContractError(f"state has negative eigenvalue {w[0]:.3e}")
    return M


def pure_density(vec) -> np.ndarray:
    """|v><v| for a (not necessarily normalized) state vector."""
    v = np.asarray(vec, dtype=complex).ravel()
    n = np.linalg.norm(v)
    if n == 0:
        raise ContractError("cannot normalize the zero vector")
    v = v / n
    return np.outer(v, v.conj())


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex) / d


def ground_projector(Hz, rel_gap_tol: float = 1e-8) -> np.ndarray:
    """Projector onto the (possibly degenerate) lowest eigenspace of Hz."""
    w, V = eigh(Hz)
    scale = max(1.0, abs(float(w[-1])))
    sel = w <= w[0] + rel_gap_tol * scale
    Vg = V[:, sel]
    return Vg @ dagger(Vg)


def highest_energy_state(Hz) -> np.ndarray:
    """Pure state on the top eigenvector of Hz (default mixing start)."""
    _, V = eigh(Hz)
    return pure_density(V[:, -1])


# ---------------------------------------------------------------------------
# Specification and jump synthesis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LindbladSpec:
    """Hermitian drift Hz, jump operators, and the discrete step size tau."""

    Hz: np.ndarray
    jumps: list[np.ndarray] = field(default_factory=list)
    tau: float = 0.1

    def __post_init__(self):
        Hz = require_hermitian(self.Hz, name="Hz")
        object.__setattr__(self, "Hz", Hz)
        object.__setattr__(self, "jumps", [as_complex_matrix(K, square=True, name="jump")
                                           for K in self.jumps])
        for K in self.jumps:
            if K.shape != Hz.shape:
                raise ContractError(
                    f"jump shape {K.shape} does not match Hz shape {Hz.shape}")
        if not self.tau > 0:
            raise ContractError(f"step size tau must be positive, got {self.tau}")

    @property
    def dim(self) -> int:
        return self.Hz.shape[0]


def step_filter(tol: float = 1e-10) -> Callable[[float], float]:
    """Sharp transition-weight profile: 1 on frequencies below -tol, else 0.

    Gives unit weight to every energy-lowering transition and none to
    level-preserving or raising ones, which pins the jump-rate scale to 1.
    """
    def fhat(omega: float) -> float:
        return 1.0 if omega < -tol else 0.0
    return fhat


def jump_from_coupling(Hz, O, fhat: Callable[[float], float] | None = None,
                       tol: float = 1e-10) -> np.ndarray:
    """Synthesize a jump operator from a coupling in the energy basis of Hz.

    K = sum_{j,k} fhat(lam_j - lam_k) <psi_j|O|psi_k> |psi_j><psi_k| over the
    eigenpairs (lam, psi) of Hz.  The profile must vanish on nonnegative
    frequencies (checked by sampling fhat(0) and fhat(1)), which guarantees
    the resulting K annihilates the ground space.
    """
    if fhat is None:
        fhat = step_filter(tol)
    if fhat(0.0) != 0.0 or fhat(1.0) != 0.0:
        raise ContractError("transition profile must vanish for omega >= 0")
    w, V = eigh(Hz)
    Oc = as_complex_matrix(O, square=True, name="O")
    if Oc.shape != V.shape:
        raise ContractError("coupling dimension does not match Hz")
    M = dagger(V) @ Oc @ V
    weights = np.array([[fhat(float(wj - wk)) for wk in w] for wj in w])
    return V @ (weights * M) @ dagger(V)


# ---------------------------------------------------------------------------
# Continuous-time reference dynamics
# ---------------------------------------------------------------------------

def _rhs(spec: LindbladSpec, rho: np.ndarray) -> np.ndarray:
    out = -1j * (spec.Hz @ rho - rho @ spec.Hz)
    for K in spec.jumps:
        KdK = dagger(K) @ K
        out += K @ rho @ dagger(K) - 0.5 * (KdK @ rho + rho @ KdK)
    return out


def lindblad_rhs(spec: LindbladSpec, rho) -> np.ndarray:
    """Generator action -i[Hz, rho] + sum_a (K rho K^dag - {K^dag K, rho}/2)."""
    return _rhs(spec, require_density(rho))


def _generator_norm_estimate(spec: LindbladSpec) -> float:
    return max(1.0, 2.0 * float(np.linalg.norm(spec.Hz, 2)))


def evolve_continuous(spec: LindbladSpec, rho0, t_final: float, dt: float) -> np.ndarray:
    """Fixed-step fourth-order Runge-Kutta integration of the master equation.

    Each accepted step is Hermitized and trace-renormalized; drift beyond
    1e-6 before that re-projection aborts with NumericalError.  This is the
    reference integrator the discrete channel is checked against.
    """
    rho = require_density(rho0)
    if t_final < 0:
        raise ContractError(f"t_final must be nonnegative, got {t_final}")
    if t_final == 0:
        return rho.copy()
    if dt <= 0:
        raise ContractError(f"dt must be positive, got {dt}")
    limit = 0.01 / _generator_norm_estimate(spec)
    if dt > limit:
        raise ContractError(
            f"dt={dt} too large for generator norm estimate (limit {limit:.3e})")
    steps = max(1, int(round(t_final / dt)))
    h = t_final / steps
    for _ in range(steps):
        k1 = _rhs(spec, rho)
        k2 = _rhs(spec, rho + 0.5 * h * k1)
        k3 = _rhs(spec, rho + 0.5 * h * k2)
        k4 = _rhs(spec, rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        drift = abs(np.trace(rho) - 1.0)
        herm = np.abs(rho - dagger(rho)).max()
        if drift > STATE_DRIFT_LIMIT or herm > STATE_DRIFT_LIMIT:
            raise NumericalError(
                f"integration drifted off the state manifold (trace {drift:.2e}, "
                f"hermiticity {herm:.2e})")
        rho = 0.5 * (rho + dagger(rho))
        rho = rho / np.trace(rho).real
    return rho


# ---------------------------------------------------------------------------
# Discrete-time channel
# ---------------------------------------------------------------------------

class DiscreteChannel:
    """One step: conjugate by exp(-i*tau*Hz), then per jump apply the
    Stinespring dilation rotation with angle sqrt(tau) and trace the ancilla.

    Unitaries are precomputed, so repeated application is cheap.
    """

    def __init__(self, spec: LindbladSpec):
        self.spec = spec
        self._U = expm_hermitian(spec.Hz, spec.tau)
        angle = np.sqrt(spec.tau)
        self._W = [expm_hermitian(hermitian_dilation(K), angle) for K in spec.jumps]
        self._e00 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = self._U @ rho @ dagger(self._U)
        for W in self._W:
            big = kron(self._e00, rho)
            big = W @ big @ dagger(W)
            rho = partial_trace_first(big, 2)
        return 0.5 * (rho + dagger(rho))


def step_discrete(spec: LindbladSpec, rho) -> np.ndarray:
    """Apply the discrete channel once and validate the output state."""
    out = DiscreteChannel(spec).apply(require_density(rho))
    return require_density(out)


def apply_channel(spec: LindbladSpec, rho0, steps: int) -> np.ndarray:
    """Iterate the discrete channel `steps` times from rho0."""
    rho = require_density(rho0)
    chan = DiscreteChannel(spec)
    for _ in range(steps):
        rho = chan.apply(rho)
    return rho


def deferred_reset_equivalence(spec: LindbladSpec, rho0, steps: int) -> float:
    """Frobenius distance between k channel steps and the reset-free circuit.

    The reset-free variant gives every dissipative rotation its own ancilla,
    runs all of them on the enlarged register, and traces the ancillas out
    only at the end.  The two must agree to numerical precision; the return
    value is the observed distance.
    """
    rho = require_density(rho0)
    if steps < 1:
        raise ContractError(f"steps must be >= 1, got {steps}")
    d = spec.dim
    n_anc = steps * len(spec.jumps)
    big_dim = (2**n_anc) * d
    if big_dim > DILATION_DIM_CAP:
        raise ResourceError(
            f"accumulated-ancilla dimension {big_dim} exceeds cap {DILATION_DIM_CAP}")

    reference = apply_channel(spec, rho, steps)

    # Register order: a_{n-1} (x) ... (x) a_0 (x) system, ancilla 0 used first.
    anc_vac = np.zeros((2**n_anc, 2**n_anc), dtype=complex)
    anc_vac[0, 0] = 1.0
    big = kron(anc_vac, rho)
    U_sys = expm_hermitian(spec.Hz, spec.tau)
    U_full = kron(np.eye(2**n_anc, dtype=complex), U_sys)
    ket01 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    angle = np.sqrt(spec.tau)
    anc_index = 0
    for _ in range(steps):
        big = U_full @ big @ dagger(U_full)
        for K in spec.jumps:
            front = np.eye(2 ** (n_anc - 1 - anc_index), dtype=complex)
            mid = np.eye(2**anc_index, dtype=complex)
            dil = kron(ket01, kron(mid, dagger(K)))
            dil = dil + dagger(dil)
            W = expm_hermitian(kron(front, dil), angle)
            big = W @ big @ dagger(W)
            anc_index += 1
    traced = partial_trace_first(big, 2**n_anc)
    return float(np.linalg.norm(traced - reference))


# ---------------------------------------------------------------------------
# Mixing-time measurement
# ---------------------------------------------------------------------------

@dataclass
class MixingResult:
    """Trajectory record of a discrete-channel run toward the ground space.

    ``t_sim = steps * tau`` is an effective runtime label for the discrete
    iteration, not a point on the continuous-time trajectory.
    """

    converged: bool
    steps: int
    t_sim: float
    final_gap: float
    tau: float
    ground_energy: float
    energies: np.ndarray
    gaps: np.ndarray
    fidelities: np.ndarray


def mixing_time_discrete(spec: LindbladSpec, rho0=None, threshold: float = 1e-3,
                         max_steps: int = 10000) -> MixingResult:
    """Iterate the channel until |Tr(Hz rho) - E0| drops below threshold.

    Starts from the highest-energy eigenstate of Hz unless rho0 is given.
    A run that exhausts max_steps returns converged=False with the final
    gap attached rather than raising.
    """
    if threshold <= 0:
        raise ContractError(f"threshold must be positive, got {threshold}")
    if max_steps < 0:
        raise ContractError(f"max_steps must be nonnegative, got {max_steps}")
    w, _ = eigh(spec.Hz)
    e0 = float(w[0])
    proj0 = ground_projector(spec.Hz)
    rho = highest_energy_state(spec.Hz) if rho0 is None else require_density(rho0)
    chan = DiscreteChannel(spec)

    energies, gaps, fids = [], [], []

    def record(state: np.ndarray) -> float:
        energy = float(np.trace(spec.Hz @ state).real)
        gap = abs(energy - e0)
        energies.append(energy)
        gaps.append(gap)
        fids.append(float(np.trace(proj0 @ state).real))
        return gap

    gap = record(rho)
    steps = 0
    while gap > threshold and steps < max_steps:
        rho = chan.apply(rho)
        steps += 1
        gap = record(rho)
    return MixingResult(
        converged=gap <= threshold,
        steps=steps,
        t_sim=steps * spec.tau,
        final_gap=gap,
        tau=spec.tau,
        ground_energy=e0,
        energies=np.array(energies),
        gaps=np.array(gaps),
        fidelities=np.array(fids),
    )


def write_trajectory_csv(result: MixingResult, path) -> None:
    """Write `step,t_sim,energy,gap,fidelity_ground` rows, one per step."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "t_sim", "energy", "gap", "fidelity_ground"])
        for k in range(len(result.energies)):
            writer.writerow([k, repr(k * result.tau), repr(result.energies[k]),
                             repr(result.gaps[k]), repr(result.fidelities[k])])


# ---------------------------------------------------------------------------
# Model-specific factories
# ---------------------------------------------------------------------------

def shifted_quadratic_hamiltonian(A, z: complex) -> np.ndarray:
    """Hz = (A - z)^dag (A - z), symmetrized to remove floating-point dust."""
    M = as_complex_matrix(A, square=True, name="A")
    Az = M - z * np.eye(M.shape[0])
    Hz = dagger(Az) @ Az
    return 0.5 * (Hz + dagger(Hz))


def hn_lindblad_spec(n: int, J: float = 1.0, gamma: float = 0.8, z: complex = 0.0,
                     tau: float = 0.1, include_reflection: bool = False) -> LindbladSpec:
    """Dissipative spec for the periodic asymmetric-hopping chain shifted by z.

    Uses the two Fourier-phase couplings; `include_reflection` adds the
    position-reversal coupling (useful away from z = 0).
    """
    H = hatano_nelson(HnParams(n=n, J=J, gamma=gamma, boundary="pbc"))
    Hz = shifted_quadratic_hamiltonian(H, z)
    O0, O1 = hn_couplings(n)
    couplings = [O0, O1]
    if include_reflection:
        couplings.append(reflection_coupling(n))
    jumps = [jump_from_coupling(Hz, O) for O in couplings]
    return LindbladSpec(Hz=Hz, jumps=jumps, tau=tau)


def qubit_lindblad_spec(g: float = 1.0, z: complex = 0.0, tau: float = 1.0) -> LindbladSpec:
    """Dissipative spec for the qubit model with a single Pauli-X coupling."""
    Hz = shifted_quadratic_hamiltonian(qubit_model(g), z)
    return LindbladSpec(Hz=Hz, jumps=[jump_from_coupling(Hz, PAULI_X)], tau=tau)
