import math

import numpy as np
import pytest

from monfermi.lattice import (
    GOLDEN_MEAN,
    PotentialSpec,
    build_hamiltonian,
    build_potential,
    build_propagator,
)


class TestPotentialSpec:
    def test_defaults(self):
        spec = PotentialSpec.quasiperiodic(1.0)
        assert spec.beta == pytest.approx(GOLDEN_MEAN)
        assert spec.theta == 0.0

    def test_golden_mean_value(self):
        assert GOLDEN_MEAN == pytest.approx((math.sqrt(5) + 1) / 2, abs=1e-15)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kind": "stark", "delta": -0.1},
            {"kind": "quasiperiodic", "v": -1.0},
            {"kind": "anderson", "w": -0.5},
            {"kind": "quasiperiodic", "v": 1.0, "beta": 0.0},
            {"kind": "quasiperiodic", "v": 1.0, "theta": 7.0},
            {"kind": "stark", "delta": float("nan")},
            {"kind": "stark", "delta": float("inf")},
            {"kind": "mystery"},
        ],
    )
    def test_invalid_parameters(self, kwargs):
        with pytest.raises(ValueError):
            PotentialSpec(**kwargs)

    def test_strength_property(self):
        assert PotentialSpec.stark(0.8).strength == 0.8
        assert PotentialSpec.quasiperiodic(2.5).strength == 2.5
        assert PotentialSpec.anderson(1.5).strength == 1.5
        assert PotentialSpec.none().strength == 0.0


class TestBuildPotential:
    def test_stark_value(self):
        # delta * j / L at j=4, L=8
        p = build_potential(PotentialSpec.stark(0.8), 8)
        assert p[4] == pytest.approx(0.4, abs=1e-15)

    def test_stark_monotone(self):
        p = build_potential(PotentialSpec.stark(1.3), 33)
        assert np.all(np.diff(p) > 0)
        assert p[0] == 0.0

    def test_quasiperiodic_at_origin(self):
        p = build_potential(PotentialSpec.quasiperiodic(2.5, theta=0.0), 8)
        assert p[0] == pytest.approx(2.5, abs=1e-15)

    def test_quasiperiodic_bounded(self):
        p = build_potential(PotentialSpec.quasiperiodic(1.7), 301)
        assert np.max(np.abs(p)) <= 1.7 + 1e-12

    def test_anderson_degenerate_width(self, rng):
        p = build_potential(PotentialSpec.anderson(0.0), 16, rng)
        assert np.all(p == 0.0)

    def test_anderson_range_and_rng_use(self, rng):
        p = build_potential(PotentialSpec.anderson(0.7), 4096, rng)
        assert np.max(np.abs(p)) <= 0.7
        assert np.std(p) > 0.1

    def test_anderson_requires_rng(self):
        with pytest.raises(ValueError):
            build_potential(PotentialSpec.anderson(1.0), 8)

    def test_none_is_zero(self):
        assert np.all(build_potential(PotentialSpec.none(), 8) == 0.0)

    def test_too_short(self):
        with pytest.raises(ValueError):
            build_potential(PotentialSpec.none(), 1)


class TestBuildHamiltonian:
    def test_two_site_spectrum(self):
        ham = build_hamiltonian(1.0, np.zeros(2))
        assert np.allclose(ham.h, [[0, -1], [-1, 0]])
        assert np.linalg.eigvalsh(ham.h) == pytest.approx([-1.0, 1.0])

    def test_constant_diagonal_shift(self):
        ham = build_hamiltonian(1.0, np.full(3, 5.0))
        expected = np.array([5.0 - math.sqrt(2), 5.0, 5.0 + math.sqrt(2)])
        assert np.linalg.eigvalsh(ham.h) == pytest.approx(expected, abs=1e-12)

    def test_exact_hermiticity(self):
        p = build_potential(PotentialSpec.stark(0.8), 8)
        ham = build_hamiltonian(1.0, p)
        assert np.array_equal(ham.h, ham.h.conj().T)

    def test_open_boundaries(self):
        ham = build_hamiltonian(1.0, np.zeros(6))
        assert ham.h[0, 5] == 0 and ham.h[5, 0] == 0
        assert np.count_nonzero(ham.h) == 10  # 2*(L-1) hopping entries

    def test_stark_spectrum_vs_independent_construction(self):
        # Independent dense construction by explicit loops, then eigvalsh.
        L, J, delta = 8, 1.0, 0.8
        m = np.zeros((L, L))
        for j in range(L - 1):
            m[j, j + 1] = m[j + 1, j] = -J
        for j in range(L):
            m[j, j] = delta * j / L
        ham = build_hamiltonian(J, build_potential(PotentialSpec.stark(delta), L))
        assert np.max(np.abs(np.linalg.eigvalsh(ham.h) - np.linalg.eigvalsh(m))) < 1e-10

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            build_hamiltonian(float("nan"), np.zeros(4))
        with pytest.raises(ValueError):
            build_hamiltonian(1.0, np.array([0.0]))
        with pytest.raises(ValueError):
            build_hamiltonian(1.0, np.array([0.0, float("inf")]))


class TestPropagator:
    def test_zero_hamiltonian_gives_identity(self):
        ham = build_hamiltonian(0.0, np.zeros(4))
        # J=0 is rejected at the model level, not here; h=0 is legal input.
        prop = build_propagator(ham, 0.05)
        assert np.allclose(prop.k, np.eye(4), atol=1e-14)

    @pytest.mark.parametrize("L,dt", [(2, 0.05), (16, 0.01), (64, 0.1), (128, 0.05)])
    def test_unitarity(self, L, dt):
        p = build_potential(PotentialSpec.quasiperiodic(1.3, theta=0.4), L)
        prop = build_propagator(build_hamiltonian(1.0, p), dt)
        defect = np.max(np.abs(prop.k.conj().T @ prop.k - np.eye(L)))
        assert defect < 1e-10

    def test_matches_taylor_series(self):
        ham = build_hamiltonian(1.0, np.zeros(2))
        dt = 0.01
        prop = build_propagator(ham, dt)
        a = -1j * ham.h * dt
        series = np.zeros((2, 2), dtype=complex)
        term = np.eye(2, dtype=complex)
        for order in range(6):
            series += term
            term = term @ a / (order + 1)
        assert np.max(np.abs(prop.k - series)) < 1e-9

    def test_invalid_dt(self):
        ham = build_hamiltonian(1.0, np.zeros(4))
        with pytest.raises(ValueError):
            build_propagator(ham, 0.0)

    def test_group_property(self):
        ham = build_hamiltonian(1.0, build_potential(PotentialSpec.stark(0.5), 6))
        k1 = build_propagator(ham, 0.05).k
        k2 = build_propagator(ham, 0.1).k
        assert np.max(np.abs(k1 @ k1 - k2)) < 1e-12
