"""Smallest-singular-value evaluation and pseudospectrum membership.

A point z belongs to the eps-pseudospectrum of A exactly when the smallest
singular value of A - z*I is at most eps, so membership decisions and grid
sweeps all reduce to sigma_0 evaluations.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .numlin import as_complex_matrix, svd

VERDICT_IN = "IN"
VERDICT_OUT = "OUT"
VERDICT_PROMISE_GAP = "PROMISE_GAP"


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of one membership query, with the measured sigma_0 attached."""

    z: complex
    sigma0: float
    eps: float
    verdict: str


@dataclass(frozen=True)
class PseudoGrid:
    """sigma_0(A - z*I) sampled over a rectangular complex grid.

    ``sigma0[i, j]`` corresponds to z = re_axis[j] + 1j * im_axis[i]; storing
    the raw values (not booleans) lets one sweep serve every threshold.
    """

    re_axis: np.ndarray
    im_axis: np.ndarray
    sigma0: np.ndarray
    eps: float

    def __post_init__(self):
        for name, ax in (("re_axis", self.re_axis), ("im_axis", self.im_axis)):
            if ax.size == 0:
                raise ContractError(f"{name} must be nonempty")
            if ax.size > 1 and not np.all(np.diff(ax) > 0):
                raise ContractError(f"{name} must be strictly increasing")
        if self.sigma0.shape != (self.im_axis.size, self.re_axis.size):
            raise ContractError("sigma0 shape does not match the axes")
        if np.any(self.sigma0 < 0):
            raise ContractError("sigma0 entries must be nonnegative")


def sigma0_at(A, z: complex) -> float:
    """Smallest singular value of A - z*I."""
    M = as_complex_matrix(A, square=True, name="A")
    shifted = M - z * np.eye(M.shape[0])
    return float(svd(shifted).sigma[0])


def decide_membership(A, z: complex, eps: float) -> MembershipVerdict:
    """Decide pseudospectrum membership at threshold eps.

    Returns IN when sigma_0 <= eps, OUT when sigma_0 >= 2*eps, and
    PROMISE_GAP in between (the query falls outside the promise and neither
    answer would be honest).
    """
    if eps <= 0:
        raise ContractError(f"eps must be positive, got {eps}")
    s0 = sigma0_at(A, z)
    if s0 <= eps:
        verdict = VERDICT_IN
    elif s0 >= 2 * eps:
        verdict = VERDICT_OUT
    else:
        verdict = VERDICT_PROMISE_GAP
    return MembershipVerdict(z=complex(z), sigma0=s0, eps=eps, verdict=verdict)


def sweep_grid(A, re_axis, im_axis, eps: float, threads: int = 1) -> PseudoGrid:
    """Evaluate sigma_0(A - z*I) at every node of a rectangular grid.

    Rows (fixed Im z) are independent and may be farmed out to a thread
    pool; assembly is row-ordered so the result is identical either way.
    """
    M = as_complex_matrix(A, square=True, name="A")
    re = np.atleast_1d(np.asarray(re_axis, dtype=float))
    im = np.atleast_1d(np.asarray(im_axis, dtype=float))

    def row(b: float) -> np.ndarray:
        return np.array([sigma0_at(M, a + 1j * b) for a in re])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, im))
    else:
        rows = [row(b) for b in im]
    return PseudoGrid(re_axis=re, im_axis=im, sigma0=np.vstack(rows), eps=eps)


def ep_radius(eps: float) -> float:
    """Radius sqrt(2*eps + eps^2) of the degenerate qubit model's level set."""
    if eps < 0:
        raise ContractError(f"eps must be nonnegative, got {eps}")
    return float(np.sqrt(2.0 * eps + eps * eps))


def write_grid_csv(grid: PseudoGrid, path) -> None:
    """Write the grid as `re,im,sigma0` rows, row-major over (im, re)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["re", "im", "sigma0"])
        for i, b in enumerate(grid.im_axis):
            for j, a in enumerate(grid.re_axis):
                writer.writerow([f"{a:.17g}", f"{b:.17g}", f"{grid.sigma0[i, j]:.17g}"])
