"""Slater-determinant states: unitary steps, occupations, projective measurements.

A pure free-fermion state with N particles on L sites is stored as the L x N
matrix of its occupied single-particle orbitals.  All physical observables
depend only on the column span, so every operation here is free to rotate or
re-orthonormalize the columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .exceptions import ForbiddenOutcomeError, NumericalError
from .lattice import Propagator

ORTHONORMALITY_TOL = 1e-10
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class SlaterState:
    """Orbital matrix u (site index x orbital index) with orthonormal columns."""

    u: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.u.flags.writeable = False

    @property
    def L(self) -> int:
        return self.u.shape[0]

    @property
    def N(self) -> int:
        return self.u.shape[1]


def neel_state(L: int) -> SlaterState:
    """Alternating-occupation product state: sites 0, 2, 4, ... occupied (N = L/2)."""
    if L < 2 or L % 2 != 0:
        raise ValueError(f"Neel state needs an even number of sites >= 2, got L={L}")
    u = np.zeros((L, L // 2), dtype=complex)
    u[2 * np.arange(L // 2), np.arange(L // 2)] = 1.0
    return SlaterState(u=u)


def orthonormality_defect(state: SlaterState) -> float:
    """max |(u^dag u - I)_kl|."""
    g = state.u.conj().T @ state.u
    return float(np.max(np.abs(g - np.eye(state.N))))


def reorthonormalize(state: SlaterState) -> SlaterState:
    """QR-based column orthonormalization; leaves the column span (hence all
    observables) unchanged."""
    q, r = scipy.linalg.qr(
        np.array(state.u), mode="economic", check_finite=False, overwrite_a=True
    )
    small = np.min(np.abs(np.diagonal(r)))
    if small < 1e-13:
        raise NumericalError(
            f"rank-deficient orbital matrix (min |R_kk| = {small:.3e}); "
            "columns are no longer linearly independent"
        )
    return SlaterState(u=q)


def evolve(state: SlaterState, prop: Propagator, check_drift: bool = True) -> SlaterState:
    """One unitary step u <- k u, re-orthonormalizing if drift exceeds tolerance.

    ``check_drift=False`` skips the drift measurement; callers that do so must
    re-orthonormalize on their own cadence (one propagator application adds
    O(1e-13) defect, so a QR every 50 steps keeps the invariant with two
    orders of margin).
    """
    if prop.k.shape[0] != state.L:
        raise ValueError(f"propagator is {prop.k.shape[0]} sites but state has {state.L}")
    out = SlaterState(u=prop.k @ state.u)
    if check_drift and orthonormality_defect(out) > ORTHONORMALITY_TOL:
        out = reorthonormalize(out)
    return out


def occupation(state: SlaterState, j: int) -> float:
    """<n_j> = sum_k |u_jk|^2, clamped to [0, 1]."""
    if not 0 <= j < state.L:
        raise IndexError(f"site {j} out of range for L={state.L}")
    val = float(np.sum(np.abs(state.u[j, :]) ** 2))
    return min(max(val, 0.0), 1.0)


def occupations(state: SlaterState) -> np.ndarray:
    """All site occupations at once."""
    return np.clip(np.sum(np.abs(state.u) ** 2, axis=1), 0.0, 1.0)


def correlation_matrix(state: SlaterState) -> np.ndarray:
    """Two-point function d_mn = <c_m^dag c_n> = sum_k conj(u_mk) u_nk (Hermitian)."""
    return state.u.conj() @ state.u.T


def project_occupied(state: SlaterState, j: int) -> SlaterState:
    """Normalized n_j |psi> / sqrt(<n_j>).

    Column operations cancel the site-j amplitude of every orbital except a
    max-modulus pivot, the pivot is replaced by the site-j basis vector, and
    the columns are re-orthonormalized.
    """
    amps = state.u[j, :]
    weight = np.sum(np.abs(amps) ** 2)
    if weight <= DEGENERACY_TOL:
        raise ForbiddenOutcomeError(
            f"cannot project site {j} occupied: <n_j> = {weight:.3e} is numerically zero"
        )
    pivot = int(np.argmax(np.abs(amps)))
    u = state.u.copy()
    coeffs = u[j, :] / u[j, pivot]
    coeffs[pivot] = 0.0
    u -= np.outer(u[:, pivot], coeffs)
    u[:, pivot] = 0.0
    u[j, pivot] = 1.0
    return reorthonormalize(SlaterState(u=u))


def project_empty(state: SlaterState, j: int) -> SlaterState:
    """Normalized (1 - n_j) |psi| / sqrt(1 - <n_j>): zero row j, re-orthonormalize."""
    weight = np.sum(np.abs(state.u[j, :]) ** 2)
    if weight >= 1.0 - DEGENERACY_TOL:
        raise ForbiddenOutcomeError(
            f"cannot project site {j} empty: <n_j> = {weight:.12f} is numerically one"
        )
    u = state.u.copy()
    u[j, :] = 0.0
    return reorthonormalize(SlaterState(u=u))
