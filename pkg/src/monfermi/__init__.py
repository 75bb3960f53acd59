"""Monitored free fermions in one dimension: quantum-trajectory simulation of
entanglement dynamics under local potentials, plus the scaling analysis that
locates the entanglement phase boundary."""

from ._version import __version__
from .lattice import (
    GOLDEN_MEAN,
    PotentialSpec,
    Propagator,
    SingleParticleHamiltonian,
    build_hamiltonian,
    build_potential,
    build_propagator,
)
from .gaussian import (
    SlaterState,
    correlation_matrix,
    evolve,
    neel_state,
    occupation,
    occupations,
    project_empty,
    project_occupied,
    reorthonormalize,
)
from .observables import (
    PartitionGeometry,
    antipodal_geometry,
    connected_correlation,
    entanglement_entropy,
    entropy_profile,
    mutual_information,
)
from .monitor import (
    MeasurementEvent,
    MonitorConfig,
    SteadyObservables,
    TrajectoryRecord,
    run_trajectory,
    steady_average,
    step,
)
from .ensemble import (
    EnsembleResult,
    EnsembleSpec,
    ModelSpec,
    SweepSpec,
    realization_draw,
    run_ensemble,
    sweep_grid,
)
from .analysis import (
    BoundaryParams,
    CeffFit,
    CollapseParams,
    CorrelationFit,
    DEFAULT_BOUNDARY_LEVEL,
    GrowthEstimates,
    boundary_value,
    ceff_two_size,
    collapse_objective,
    crossing_estimate,
    fit_c0,
    fit_ceff,
    fit_collapse,
    fit_correlation_decay,
    g_factor,
    growth_regimes,
    solve_boundary,
)
from .oracle import (
    FockState,
    LockstepReport,
    ed_entropy,
    ed_evolve,
    ed_measure,
    lockstep_trajectory,
)

__all__ = [name for name in dir() if not name.startswith("_")]
