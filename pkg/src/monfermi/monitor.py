"""Stochastic measurement protocol over discrete time steps.

Each step applies one unitary propagator step and then sweeps the sites in
ascending order.  Two unravelings are provided:

* ``born_projective`` (default): every site fires independently with the
  Poisson-clock probability 1 - exp(-gamma dt); a fired site is measured
  projectively, with the occupied outcome drawn at the state's own Born
  probability <n_j>.
* ``lindblad_jump``: the jump unraveling with number operators as jump
  operators; site j jumps with probability gamma <n_j> dt and is projected
  onto occupied.  The no-jump drift is proportional to identity on the
  fixed-N sector and therefore a pure renormalization, so it is omitted.

Random variates are consumed in a documented, reproducible order per step:
first one uniform per site (ascending) for the firing decisions, then, in
``born_projective`` mode only, one uniform per fired site (ascending) for
the outcome.  Outcome probabilities are conditioned sequentially on the
projections already applied earlier in the same sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError
from .gaussian import (
    DEGENERACY_TOL,
    SlaterState,
    correlation_matrix,
    evolve,
    occupation,
    project_empty,
    project_occupied,
    reorthonormalize,
)
from .lattice import Propagator, SingleParticleHamiltonian, build_propagator
from .observables import (
    antipodal_geometry,
    connected_correlation_row,
    entropy_profile_from_correlation,
    mutual_information_from_correlation,
)
from .seeding import generator

OCCUPIED = "occupied"
EMPTY = "empty"

PROTOCOLS = ("born_projective", "lindblad_jump")

# Unitary steps between forced re-orthonormalizations (projections reset it).
_REORTHO_EVERY = 50


@dataclass(frozen=True)
class MonitorConfig:
    """Measurement rate, step sizes, and snapshot/averaging windows.

    ``t_max=None`` means "resolve later" (ensemble specs default it to 2L/J).
    """

    gamma: float
    t_max: float | None = None
    dt: float = 0.05
    protocol: str = "born_projective"
    obs_interval: float = 1.0
    steady_window_fraction: float = 0.25

    def __post_init__(self) -> None:
        if self.gamma < 0 or not np.isfinite(self.gamma):
            raise ValueError(f"measurement rate must be >= 0, got {self.gamma}")
        if not 0 < self.dt <= 0.1:
            raise ValueError(f"time step must lie in (0, 0.1], got {self.dt}")
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}, expected one of {PROTOCOLS}")
        if self.obs_interval <= 0:
            raise ValueError(f"obs_interval must be positive, got {self.obs_interval}")
        if self.t_max is not None and self.t_max < self.obs_interval:
            raise ValueError(
                f"t_max={self.t_max} is shorter than one snapshot interval {self.obs_interval}"
            )
        if not 0 < self.steady_window_fraction <= 1:
            raise ValueError(
                f"steady_window_fraction must lie in (0, 1], got {self.steady_window_fraction}"
            )

    @property
    def steps_per_snapshot(self) -> int:
        n = round(self.obs_interval / self.dt)
        if n < 1 or abs(n * self.dt - self.obs_interval) > 1e-9:
            raise ValueError(
                f"obs_interval={self.obs_interval} is not an integer multiple of dt={self.dt}"
            )
        return n

    @property
    def n_steps(self) -> int:
        if self.t_max is None:
            raise ValueError("t_max is unresolved; set it (ensembles default it to 2L/J)")
        return round(self.t_max / self.dt)


@dataclass(frozen=True)
class MeasurementEvent:
    """One applied projective measurement."""

    time: float
    site: int
    outcome: str


@dataclass
class TrajectoryRecord:
    """Observable time series of a single quantum trajectory."""

    seed: int
    times: np.ndarray
    entropy_profiles: np.ndarray  # (n_snapshots, L-1)
    mutual_info: np.ndarray | None
    correlations: np.ndarray | None  # (n_snapshots, L/2 - 1)
    event_count: int
    realization: dict | None = None

    @property
    def L(self) -> int:
        return self.entropy_profiles.shape[1] + 1


@dataclass(frozen=True)
class SteadyObservables:
    """Per-trajectory steady-state averages over the trailing snapshot window."""

    entropy_profile: np.ndarray
    s_half: float
    mutual_info: float | None
    correlations: np.ndarray | None


def step(
    state: SlaterState,
    prop: Propagator,
    config: MonitorConfig,
    rng: np.random.Generator,
    time: float = 0.0,
) -> tuple[SlaterState, list[MeasurementEvent]]:
    """One unitary step followed by the measurement sweep; returns applied events.

    Orthonormality is maintained by the projections' QR plus the caller's
    50-step cadence, so the unitary substep skips its per-step drift check.
    """
    state = evolve(state, prop, check_drift=False)
    L = state.L
    fire_u = rng.random(L)
    events: list[MeasurementEvent] = []
    if config.protocol == "born_projective":
        p_fire = -np.expm1(-config.gamma * config.dt)
        for j in np.flatnonzero(fire_u < p_fire):
            j = int(j)
            outcome_u = rng.random()
            n_j = occupation(state, j)
            if n_j >= 1.0 - DEGENERACY_TOL:
                outcome = OCCUPIED  # forced, state already an eigenstate
            elif n_j <= DEGENERACY_TOL:
                outcome = EMPTY
            elif outcome_u < n_j:
                outcome = OCCUPIED
                state = project_occupied(state, j)
            else:
                outcome = EMPTY
                state = project_empty(state, j)
            events.append(MeasurementEvent(time=time, site=j, outcome=outcome))
    else:  # lindblad_jump
        rate = config.gamma * config.dt
        for j in range(L):
            n_j = occupation(state, j)
            if fire_u[j] < rate * n_j:
                if n_j < 1.0 - DEGENERACY_TOL:
                    state = project_occupied(state, j)
                events.append(MeasurementEvent(time=time, site=j, outcome=OCCUPIED))
    return state, events


def _snapshot(state, geometry, want_correlations):
    d = correlation_matrix(state)
    profile = entropy_profile_from_correlation(d)
    mi = mutual_information_from_correlation(d, geometry) if geometry is not None else None
    corr = connected_correlation_row(d) if want_correlations else None
    return profile, mi, corr


def run_trajectory(
    ham: SingleParticleHamiltonian,
    initial_state: SlaterState,
    config: MonitorConfig,
    seed: int,
    *,
    propagator: Propagator | None = None,
    mutual_info: bool | None = None,
    correlations: bool = True,
    realization: dict | None = None,
) -> TrajectoryRecord:
    """Evolve from t=0 to t_max, recording observables every ``obs_interval``.

    A pure function of its arguments: identical inputs give a bitwise
    identical record.  ``mutual_info=None`` enables the antipodal-interval
    mutual information whenever L is divisible by 8.
    """
    if ham.size != initial_state.L:
        raise ValueError(f"Hamiltonian has {ham.size} sites but state has {initial_state.L}")
    prop = propagator if propagator is not None else build_propagator(ham, config.dt)
    L = initial_state.L
    if mutual_info is None:
        mutual_info = L % 8 == 0
    geometry = antipodal_geometry(L) if mutual_info else None

    snap_every = config.steps_per_snapshot
    n_steps = config.n_steps
    rng = generator(seed)

    state = initial_state
    times = [0.0]
    prof, mi, corr = _snapshot(state, geometry, correlations)
    profiles, mis, corrs = [prof], [mi], [corr]
    event_count = 0
    steps_since_ortho = 0
    try:
        for s in range(1, n_steps + 1):
            t = s * config.dt
            state, events = step(state, prop, config, rng, time=t)
            event_count += len(events)
            steps_since_ortho = 0 if events else steps_since_ortho + 1
            if steps_since_ortho >= _REORTHO_EVERY:
                state = reorthonormalize(state)
                steps_since_ortho = 0
            if s % snap_every == 0:
                times.append(t)
                prof, mi, corr = _snapshot(state, geometry, correlations)
                profiles.append(prof)
                mis.append(mi)
                corrs.append(corr)
    except Exception as err:
        raise NumericalError(f"trajectory seed={seed} failed at t={s * config.dt:g}: {err}") from err

    return TrajectoryRecord(
        seed=seed,
        times=np.asarray(times),
        entropy_profiles=np.asarray(profiles),
        mutual_info=np.asarray(mis, dtype=float) if mutual_info else None,
        correlations=np.asarray(corrs) if correlations else None,
        event_count=event_count,
        realization=realization,
    )


def steady_average(record: TrajectoryRecord, config: MonitorConfig) -> SteadyObservables:
    """Arithmetic mean over the trailing ``steady_window_fraction`` of snapshots."""
    n = record.times.shape[0]
    if n < 4:
        raise ValueError(f"need at least 4 snapshots for a steady average, got {n}")
    k = max(1, round(config.steady_window_fraction * n))
    profile = record.entropy_profiles[-k:].mean(axis=0)
    s_half = float(profile[record.L // 2 - 1])
    mi = float(record.mutual_info[-k:].mean()) if record.mutual_info is not None else None
    corr = record.correlations[-k:].mean(axis=0) if record.correlations is not None else None
    return SteadyObservables(entropy_profile=profile, s_half=s_half, mutual_info=mi, correlations=corr)
