"""Brute-force many-body reference on small chains (L <= 10).

States live in the fixed-particle-number Fock sector, represented as a dense
amplitude vector over occupation bitstrings.  The module re-derives every
observable from first principles (explicit partial traces, explicit operator
matrix elements) so it shares no code path with the Gaussian engine, and it
provides a lockstep driver that runs the full measurement protocol on both
representations against a single random stream.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import CapacityError, ForbiddenOutcomeError, NumericalError
from .gaussian import SlaterState, correlation_matrix, neel_state, occupations, reorthonormalize
from .lattice import SingleParticleHamiltonian, build_propagator
from .monitor import EMPTY, OCCUPIED, MonitorConfig, _REORTHO_EVERY, step
from .observables import (
    antipodal_geometry,
    connected_correlation_row,
    entropy_profile_from_correlation,
    mutual_information_from_correlation,
)
from .seeding import generator

MAX_SITES = 10


def _check_capacity(L: int) -> None:
    if L > MAX_SITES:
        raise CapacityError(f"exact-diagonalization oracle supports L <= {MAX_SITES}, got L={L}")


@lru_cache(maxsize=32)
def sector_basis(L: int, N: int) -> tuple[tuple[tuple[int, ...], ...], dict]:
    """Occupation basis of the N-particle sector: tuple of occupied-site tuples
    (itertools.combinations order) and the inverse lookup."""
    configs = tuple(itertools.combinations(range(L), N))
    index = {c: i for i, c in enumerate(configs)}
    return configs, index


@dataclass
class FockState:
    """Normalized amplitude vector over the fixed-N occupation basis."""

    amplitudes: np.ndarray = field(repr=False)
    L: int
    N: int

    def normalized(self) -> "FockState":
        norm = np.linalg.norm(self.amplitudes)
        if norm <= 1e-14:
            raise NumericalError("attempted to normalize a zero Fock vector")
        return FockState(amplitudes=self.amplitudes / norm, L=self.L, N=self.N)


def neel_fock(L: int) -> FockState:
    """The alternating product state as a sector basis vector."""
    _check_capacity(L)
    if L % 2 != 0:
        raise ValueError(f"Neel state needs even L, got {L}")
    N = L // 2
    configs, index = sector_basis(L, N)
    amps = np.zeros(len(configs), dtype=complex)
    amps[index[tuple(range(0, L, 2))]] = 1.0
    return FockState(amplitudes=amps, L=L, N=N)


def fock_from_slater(state: SlaterState) -> FockState:
    """Expand a Slater determinant into sector amplitudes (minors of the orbital
    matrix)."""
    _check_capacity(state.L)
    configs, _ = sector_basis(state.L, state.N)
    amps = np.array([np.linalg.det(state.u[list(c), :]) for c in configs])
    return FockState(amplitudes=amps, L=state.L, N=state.N).normalized()


def _hop_sign(occupied: tuple[int, ...], a: int, b: int) -> int:
    """Fermionic sign for moving a particle from site b to site a (Jordan-Wigner
    string between them; +1 for adjacent sites)."""
    lo, hi = (a, b) if a < b else (b, a)
    crossed = sum(1 for s in occupied if lo < s < hi)
    return -1 if crossed % 2 else 1


@lru_cache(maxsize=8)
def _sector_hamiltonian(h_bytes: bytes, L: int, N: int) -> np.ndarray:
    h = np.frombuffer(h_bytes, dtype=complex).reshape(L, L)
    configs, index = sector_basis(L, N)
    dim = len(configs)
    H = np.zeros((dim, dim), dtype=complex)
    diag_p = np.real(np.diagonal(h))
    for i, occ in enumerate(configs):
        H[i, i] = sum(diag_p[s] for s in occ)
        occ_set = set(occ)
        for b in occ:
            for a in (b - 1, b + 1):
                if 0 <= a < L and a not in occ_set:
                    target = tuple(sorted(occ_set - {b} | {a}))
                    H[index[target], i] += h[a, b] * _hop_sign(occ, a, b)
    defect = np.max(np.abs(H - H.conj().T))
    if defect > 1e-12:
        raise NumericalError(f"sector Hamiltonian lost Hermiticity (defect {defect:.2e})")
    return H


@lru_cache(maxsize=8)
def _sector_propagator(h_bytes: bytes, L: int, N: int, dt: float) -> np.ndarray:
    H = _sector_hamiltonian(h_bytes, L, N)
    energies, modes = np.linalg.eigh(H)
    return (modes * np.exp(-1j * energies * dt)) @ modes.conj().T


def ed_evolve(state: FockState, ham: SingleParticleHamiltonian, dt: float) -> FockState:
    """Apply exp(-i H_many dt) in the fixed-N sector (propagator built once and
    cached per (Hamiltonian, dt))."""
    _check_capacity(state.L)
    if ham.size != state.L:
        raise ValueError(f"Hamiltonian has {ham.size} sites but state has {state.L}")
    U = _sector_propagator(ham.h.tobytes(), state.L, state.N, dt)
    return FockState(amplitudes=U @ state.amplitudes, L=state.L, N=state.N)


def ed_outcome_probability(state: FockState, j: int, outcome: str) -> float:
    """Born probability of finding site j in `outcome`."""
    configs, _ = sector_basis(state.L, state.N)
    weights = np.abs(state.amplitudes) ** 2
    p_occ = sum(w for w, c in zip(weights, configs) if j in c)
    return p_occ if outcome == OCCUPIED else 1.0 - p_occ


def ed_measure(state: FockState, j: int, outcome: str) -> FockState:
    """Project site j onto `outcome` and renormalize."""
    if outcome not in (OCCUPIED, EMPTY):
        raise ValueError(f"unknown outcome {outcome!r}")
    configs, _ = sector_basis(state.L, state.N)
    keep = np.array([(j in c) == (outcome == OCCUPIED) for c in configs])
    prob = float(np.sum(np.abs(state.amplitudes[keep]) ** 2))
    if prob <= 1e-12:
        raise ForbiddenOutcomeError(
            f"outcome {outcome} at site {j} has probability {prob:.3e}"
        )
    amps = np.where(keep, state.amplitudes, 0.0)
    return FockState(amplitudes=amps, L=state.L, N=state.N).normalized()


def ed_occupations(state: FockState) -> np.ndarray:
    """<n_j> for all sites from the amplitude weights."""
    configs, _ = sector_basis(state.L, state.N)
    weights = np.abs(state.amplitudes) ** 2
    out = np.zeros(state.L)
    for w, occ in zip(weights, configs):
        for s in occ:
            out[s] += w
    return out


def ed_density_correlation(state: FockState, m: int, n: int) -> float:
    """<n_m n_n>, diagonal in the occupation basis."""
    configs, _ = sector_basis(state.L, state.N)
    weights = np.abs(state.amplitudes) ** 2
    return float(sum(w for w, c in zip(weights, configs) if m in c and n in c))


def ed_correlation_matrix(state: FockState) -> np.ndarray:
    """<c_m^dag c_n> with explicit fermionic signs."""
    configs, index = sector_basis(state.L, state.N)
    L = state.L
    d = np.zeros((L, L), dtype=complex)
    for i, occ in enumerate(configs):
        amp = state.amplitudes[i]
        if amp == 0:
            continue
        occ_set = set(occ)
        for s in occ:
            d[s, s] += np.abs(amp) ** 2
        for n in occ:
            sign_n = -1 if sum(1 for s in occ if s < n) % 2 else 1
            removed = occ_set - {n}
            for m in range(L):
                if m == n or m in removed:
                    continue
                sign_m = -1 if sum(1 for s in removed if s < m) % 2 else 1
                target = tuple(sorted(removed | {m}))
                d[m, n] += sign_m * sign_n * np.conj(state.amplitudes[index[target]]) * amp
    return d


def ed_entropy(state: FockState, region) -> float:
    """Von Neumann entropy of `region` by explicit partial trace.

    Amplitudes are rearranged into a (region) x (complement) matrix with the
    fermionic reordering sign, and the reduced density matrix is diagonalized.
    """
    L = state.L
    if isinstance(region, tuple) and len(region) == 2:
        sites = list(range(region[0], region[1]))
    else:
        sites = sorted(set(int(s) for s in np.atleast_1d(region)))
    if not sites or min(sites) < 0 or max(sites) >= L:
        raise ValueError(f"invalid region {region} for L={L}")
    region_set = set(sites)
    pos_a = {s: i for i, s in enumerate(sites)}
    comp = [s for s in range(L) if s not in region_set]
    pos_b = {s: i for i, s in enumerate(comp)}

    configs, _ = sector_basis(L, state.N)
    psi = np.zeros((2 ** len(sites), 2 ** len(comp)), dtype=complex)
    for amp, occ in zip(state.amplitudes, configs):
        if amp == 0:
            continue
        mask_a = 0
        mask_b = 0
        for s in occ:
            if s in region_set:
                mask_a |= 1 << pos_a[s]
            else:
                mask_b |= 1 << pos_b[s]
        # Sign of reordering the site-ascending mode product into (region, complement):
        # one transposition per (complement-occupied site preceding a region-occupied site).
        inversions = sum(1 for a in occ if a in region_set for b in occ if b not in region_set and b < a)
        psi[mask_a, mask_b] = (-1 if inversions % 2 else 1) * amp
    rho = psi @ psi.conj().T
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > 1e-12]
    return float(-np.sum(evals * np.log(evals)))


@dataclass(frozen=True)
class LockstepReport:
    """Maximum absolute deviations between the two engines over a trajectory."""

    seed: int
    gamma: float
    protocol: str
    n_snapshots: int
    event_count: int
    max_entropy_dev: float
    max_occupation_dev: float
    max_mutual_info_dev: float
    max_correlation_dev: float

    @property
    def max_deviation(self) -> float:
        return max(
            self.max_entropy_dev,
            self.max_occupation_dev,
            self.max_mutual_info_dev,
            self.max_correlation_dev,
        )


def lockstep_trajectory(
    ham: SingleParticleHamiltonian,
    config: MonitorConfig,
    seed: int,
    *,
    divergence_tol: float = 1e-6,
) -> LockstepReport:
    """Run the measurement protocol on the Gaussian and Fock representations
    against one random stream and report their maximum disagreement.

    The Gaussian engine's `step` consumes the stream and decides firing and
    outcomes; the identical events are applied to the Fock state, so the
    comparison isolates state updates and observables.  Any divergence above
    `divergence_tol` aborts with the first offending step identified.
    """
    L = ham.size
    _check_capacity(L)
    state_g = neel_state(L)
    state_e = neel_fock(L)
    prop = build_propagator(ham, config.dt)
    geometry = antipodal_geometry(L) if L % 8 == 0 else None
    rng = generator(seed)

    dev_s = dev_n = dev_mi = dev_c = 0.0
    n_snapshots = 0
    event_count = 0

    def compare(step_index: int) -> None:
        nonlocal dev_s, dev_n, dev_mi, dev_c, n_snapshots
        d = correlation_matrix(state_g)
        prof_g = entropy_profile_from_correlation(d)
        prof_e = np.array([ed_entropy(state_e, (0, ell)) for ell in range(1, L)])
        occ_g = occupations(state_g)
        occ_e = ed_occupations(state_e)
        dev_s = max(dev_s, float(np.max(np.abs(prof_g - prof_e))))
        dev_n = max(dev_n, float(np.max(np.abs(occ_g - occ_e))))
        if geometry is not None:
            mi_g = mutual_information_from_correlation(d, geometry)
            mi_e = (
                ed_entropy(state_e, geometry.a_range)
                + ed_entropy(state_e, geometry.b_range)
                - ed_entropy(state_e, np.concatenate([geometry.a_sites, geometry.b_sites]))
            )
            dev_mi = max(dev_mi, abs(mi_g - mi_e))
        corr_g = connected_correlation_row(d)
        occ_ref = occ_e[L // 2]
        corr_e = np.array(
            [
                occ_ref * occ_e[L // 2 + ell] - ed_density_correlation(state_e, L // 2, L // 2 + ell)
                for ell in range(1, L - L // 2)
            ]
        )
        dev_c = max(dev_c, float(np.max(np.abs(corr_g - corr_e))) if corr_e.size else 0.0)
        n_snapshots += 1
        worst = max(dev_s, dev_n, dev_mi, dev_c)
        if worst > divergence_tol:
            raise NumericalError(
                f"representations diverged ({worst:.3e} > {divergence_tol}) "
                f"at step {step_index}, seed={seed}"
            )

    compare(0)
    snap_every = config.steps_per_snapshot
    steps_since_ortho = 0
    for s in range(1, config.n_steps + 1):
        state_g, events = step(state_g, prop, config, rng, time=s * config.dt)
        state_e = ed_evolve(state_e, ham, config.dt)
        for ev in events:
            state_e = ed_measure(state_e, ev.site, ev.outcome)
        event_count += len(events)
        steps_since_ortho = 0 if events else steps_since_ortho + 1
        if steps_since_ortho >= _REORTHO_EVERY:
            state_g = reorthonormalize(state_g)
            steps_since_ortho = 0
        if s % snap_every == 0:
            compare(s)

    return LockstepReport(
        seed=seed,
        gamma=config.gamma,
        protocol=config.protocol,
        n_snapshots=n_snapshots,
        event_count=event_count,
        max_entropy_dev=dev_s,
        max_occupation_dev=dev_n,
        max_mutual_info_dev=dev_mi,
        max_correlation_dev=dev_c,
    )
