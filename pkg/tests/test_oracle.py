"""Cross-validation of the Gaussian engine against the brute-force sector
representation, including the lockstep protocol run."""

import numpy as np
import pytest

from conftest import random_slater
from monfermi.exceptions import CapacityError, ForbiddenOutcomeError, NumericalError
from monfermi.gaussian import (
    correlation_matrix,
    neel_state,
    occupations,
    project_empty,
    project_occupied,
)
from monfermi.lattice import PotentialSpec, build_hamiltonian, build_potential, build_propagator
from monfermi.monitor import EMPTY, OCCUPIED, MonitorConfig
from monfermi.observables import (
    antipodal_geometry,
    connected_correlation,
    entanglement_entropy,
    entropy_profile,
    mutual_information,
)
from monfermi.oracle import (
    FockState,
    ed_correlation_matrix,
    ed_density_correlation,
    ed_entropy,
    ed_evolve,
    ed_measure,
    ed_occupations,
    ed_outcome_probability,
    fock_from_slater,
    lockstep_trajectory,
    neel_fock,
    sector_basis,
)


class TestSectorBasics:
    def test_basis_dimension(self):
        configs, _ = sector_basis(8, 4)
        assert len(configs) == 70

    def test_capacity_error(self):
        with pytest.raises(CapacityError):
            neel_fock(12)

    def test_neel_norm_and_occupations(self):
        state = neel_fock(8)
        assert np.linalg.norm(state.amplitudes) == pytest.approx(1.0, abs=1e-12)
        assert ed_occupations(state) == pytest.approx([1, 0, 1, 0, 1, 0, 1, 0])


class TestEdEvolve:
    def test_zero_time_identity(self):
        state = neel_fock(6)
        ham = build_hamiltonian(1.0, np.zeros(6))
        out = ed_evolve(state, ham, 1e-30)
        assert np.max(np.abs(out.amplitudes - state.amplitudes)) < 1e-12

    def test_single_particle_sector_matches_propagator(self):
        # N=1 sector is isomorphic to the L x L single-particle problem.
        L = 6
        ham = build_hamiltonian(1.0, build_potential(PotentialSpec.stark(0.5), L))
        prop = build_propagator(ham, 0.3)
        configs, _ = sector_basis(L, 1)
        amps = np.zeros(L, dtype=complex)
        amps[0] = 1.0
        state = FockState(amplitudes=amps, L=L, N=1)
        out = ed_evolve(state, ham, 0.3)
        # basis order is ((0,), (1,), ...) so amplitudes line up with sites
        expected = prop.k @ np.eye(L)[:, 0]
        assert np.max(np.abs(out.amplitudes - expected)) < 1e-12

    def test_norm_conserved(self):
        state = neel_fock(8)
        ham = build_hamiltonian(1.0, np.zeros(8))
        for _ in range(10):
            state = ed_evolve(state, ham, 0.3)
        assert np.linalg.norm(state.amplitudes) == pytest.approx(1.0, abs=1e-12)

    def test_occupations_match_gaussian_at_t3(self):
        L = 8
        ham = build_hamiltonian(1.0, np.zeros(L))
        prop = build_propagator(ham, 0.05)
        state_g = neel_state(L)
        state_e = neel_fock(L)
        for _ in range(60):  # t = 3
            state_g = SlaterStateEvolver(prop)(state_g)
            state_e = ed_evolve(state_e, ham, 0.05)
        assert np.max(np.abs(occupations(state_g) - ed_occupations(state_e))) < 1e-9


class SlaterStateEvolver:
    def __init__(self, prop):
        self.prop = prop

    def __call__(self, state):
        from monfermi.gaussian import evolve

        return evolve(state, self.prop)


class TestEdMeasure:
    def test_neel_matching_outcome_unchanged(self):
        state = neel_fock(6)
        out = ed_measure(state, 0, OCCUPIED)
        assert np.max(np.abs(out.amplitudes - state.amplitudes)) < 1e-12

    def test_outcome_probabilities_sum_to_one(self, rng):
        state = fock_from_slater(random_slater(6, 3, rng))
        p = ed_outcome_probability(state, 2, OCCUPIED) + ed_outcome_probability(state, 2, EMPTY)
        assert p == pytest.approx(1.0, abs=1e-12)

    def test_forbidden_outcome(self):
        with pytest.raises(ForbiddenOutcomeError):
            ed_measure(neel_fock(6), 1, OCCUPIED)

    @pytest.mark.parametrize("outcome", [OCCUPIED, EMPTY])
    def test_projection_matches_gaussian(self, rng, outcome):
        for _ in range(5):
            state_g = random_slater(8, 4, rng)
            state_e = fock_from_slater(state_g)
            j = int(rng.integers(0, 8))
            project = project_occupied if outcome == OCCUPIED else project_empty
            try:
                post_g = project(state_g, j)
            except ForbiddenOutcomeError:
                continue
            post_e = ed_measure(state_e, j, outcome)
            d_g = correlation_matrix(post_g)
            d_e = ed_correlation_matrix(post_e)
            assert np.max(np.abs(d_g - d_e)) < 1e-9


class TestEdEntropy:
    def test_product_state_zero(self):
        assert ed_entropy(neel_fock(8), (0, 4)) == pytest.approx(0.0, abs=1e-12)

    def test_split_particle(self):
        # One particle across the cut: u = (|0> + |1>)/sqrt(2) on L=2.
        amps = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
        state = FockState(amplitudes=amps, L=2, N=1)
        assert ed_entropy(state, (0, 1)) == pytest.approx(np.log(2), abs=1e-12)

    def test_matches_gaussian_on_random_states(self, rng):
        for _ in range(10):
            state_g = random_slater(8, 4, rng)
            state_e = fock_from_slater(state_g)
            prof_g = entropy_profile(state_g)
            for ell in range(1, 8):
                assert prof_g[ell - 1] == pytest.approx(
                    ed_entropy(state_e, (0, ell)), abs=1e-9
                )

    def test_noncontiguous_region_matches_gaussian(self, rng):
        for _ in range(5):
            state_g = random_slater(8, 3, rng)
            state_e = fock_from_slater(state_g)
            region = [0, 3, 5]
            assert entanglement_entropy(state_g, region) == pytest.approx(
                ed_entropy(state_e, region), abs=1e-9
            )


class TestCorrelationsVsOracle:
    def test_correlation_matrix_matches(self, rng):
        for _ in range(10):
            state_g = random_slater(8, 4, rng)
            d_g = correlation_matrix(state_g)
            d_e = ed_correlation_matrix(fock_from_slater(state_g))
            assert np.max(np.abs(d_g - d_e)) < 1e-10

    def test_mutual_information_matches(self, rng):
        state_g = random_slater(8, 4, rng)
        state_e = fock_from_slater(state_g)
        geo = antipodal_geometry(8)
        mi_e = (
            ed_entropy(state_e, geo.a_range)
            + ed_entropy(state_e, geo.b_range)
            - ed_entropy(state_e, [0, 4])
        )
        assert mutual_information(state_g, geo) == pytest.approx(mi_e, abs=1e-9)

    def test_connected_correlation_is_wick_density_correlator(self, rng):
        # |<c^dag_m c_n>|^2 equals <n_m><n_n> - <n_m n_n> for Slater states (m != n).
        for _ in range(5):
            state_g = random_slater(8, 4, rng)
            state_e = fock_from_slater(state_g)
            occ = ed_occupations(state_e)
            for ell in range(1, 4):
                wick = occ[4] * occ[4 + ell] - ed_density_correlation(state_e, 4, 4 + ell)
                assert connected_correlation(state_g, ell) == pytest.approx(wick, abs=1e-9)


class TestLockstep:
    def test_neel_first_step_exact(self):
        ham = build_hamiltonian(1.0, np.zeros(8))
        config = MonitorConfig(gamma=0.5, t_max=1.0, dt=0.05)
        report = lockstep_trajectory(ham, config, seed=5)
        assert report.max_deviation < 1e-9

    def test_unitary_only(self):
        ham = build_hamiltonian(1.0, np.zeros(8))
        config = MonitorConfig(gamma=0.0, t_max=16.0)
        report = lockstep_trajectory(ham, config, seed=11)
        assert report.max_deviation < 1e-9
        assert report.event_count == 0

    @pytest.mark.parametrize("protocol", ["born_projective", "lindblad_jump"])
    def test_monitored_with_tilt(self, protocol):
        p = build_potential(PotentialSpec.stark(0.4), 8)
        ham = build_hamiltonian(1.0, p)
        config = MonitorConfig(gamma=0.5, t_max=8.0, protocol=protocol)
        report = lockstep_trajectory(ham, config, seed=3)
        assert report.max_deviation < 1e-8
        assert report.event_count > 0

    def test_divergence_tolerance_enforced(self):
        ham = build_hamiltonian(1.0, np.zeros(8))
        config = MonitorConfig(gamma=0.5, t_max=8.0)
        with pytest.raises(NumericalError):
            lockstep_trajectory(ham, config, seed=3, divergence_tol=1e-18)
