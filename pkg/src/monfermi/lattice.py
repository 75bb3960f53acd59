"""Local potentials and the single-particle Hamiltonian of the monitored chain.

The chain is a nearest-neighbor tight-binding model with open boundaries and
an on-site potential that is either absent, a linear tilt, an incommensurate
cosine (Aubry-Andre-Harper), or uncorrelated uniform disorder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NumericalError

GOLDEN_MEAN = (math.sqrt(5.0) + 1.0) / 2.0

_KINDS = ("none", "stark", "quasiperiodic", "anderson")


@dataclass(frozen=True)
class PotentialSpec:
    """On-site potential description.

    kind: one of "none", "stark" (linear tilt of maximum strength ~delta),
    "quasiperiodic" (v * cos(2*pi*beta*j + theta) with incommensurate beta),
    "anderson" (i.i.d. uniform on [-w, w]).
    """

    kind: str = "none"
    delta: float = 0.0
    v: float = 0.0
    beta: float = GOLDEN_MEAN
    theta: float = 0.0
    w: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}, expected one of {_KINDS}")
        for name in ("delta", "v", "beta", "theta", "w"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"potential parameter {name} must be finite, got {value!r}")
        if self.delta < 0 or self.v < 0 or self.w < 0:
            raise ValueError("potential strengths delta, v, w must be >= 0")
        if self.beta <= 0:
            raise ValueError(f"wave number beta must be positive, got {self.beta}")
        if not (0.0 <= self.theta < 2.0 * math.pi):
            raise ValueError(f"phase theta must lie in [0, 2*pi), got {self.theta}")

    @classmethod
    def none(cls) -> "PotentialSpec":
        return cls(kind="none")

    @classmethod
    def stark(cls, delta: float) -> "PotentialSpec":
        return cls(kind="stark", delta=delta)

    @classmethod
    def quasiperiodic(cls, v: float, beta: float = GOLDEN_MEAN, theta: float = 0.0) -> "PotentialSpec":
        return cls(kind="quasiperiodic", v=v, beta=beta, theta=theta)

    @classmethod
    def anderson(cls, w: float) -> "PotentialSpec":
        return cls(kind="anderson", w=w)

    @property
    def strength(self) -> float:
        """The single scalar strength of this potential family (0 for kind 'none')."""
        return {"none": 0.0, "stark": self.delta, "quasiperiodic": self.v, "anderson": self.w}[self.kind]

    @property
    def is_random(self) -> bool:
        """Whether realizations of this potential involve random draws."""
        return self.kind in ("quasiperiodic", "anderson")


def build_potential(spec: PotentialSpec, L: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """On-site energies p_j, j = 0..L-1, for the given potential.

    Only the Anderson variant consumes `rng`; the tilt is delta*j/L and the
    quasi-periodic potential is v*cos(2*pi*beta*j + theta).
    """
    if L < 2:
        raise ValueError(f"need at least 2 sites, got L={L}")
    j = np.arange(L, dtype=float)
    if spec.kind == "none":
        return np.zeros(L)
    if spec.kind == "stark":
        return spec.delta * j / L
    if spec.kind == "quasiperiodic":
        return spec.v * np.cos(2.0 * math.pi * spec.beta * j + spec.theta)
    # anderson
    if rng is None:
        raise ValueError("Anderson potential requires a random generator")
    return rng.uniform(-spec.w, spec.w, size=L)


@dataclass(frozen=True)
class SingleParticleHamiltonian:
    """Open-boundary hopping matrix with on-site potential on the diagonal.

    `h` is exactly Hermitian by construction: real symmetric off-diagonals
    -J on the two first off-diagonals, potential values on the diagonal.
    """

    size: int
    hopping: float
    h: np.ndarray = field(repr=False)
    potential_values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.h.flags.writeable = False
        self.potential_values.flags.writeable = False


def build_hamiltonian(J: float, p: np.ndarray) -> SingleParticleHamiltonian:
    """Assemble the L x L single-particle matrix from hopping J and potential p."""
    p = np.asarray(p, dtype=float)
    L = p.shape[0]
    if p.ndim != 1 or L < 2:
        raise ValueError(f"potential must be a vector of length >= 2, got shape {p.shape}")
    if not math.isfinite(J):
        raise ValueError(f"hopping J must be finite, got {J!r}")
    if not np.all(np.isfinite(p)):
        raise ValueError("potential values must be finite")
    h = np.zeros((L, L), dtype=complex)
    idx = np.arange(L - 1)
    h[idx, idx + 1] = -J
    h[idx + 1, idx] = -J
    h[np.arange(L), np.arange(L)] = p
    return SingleParticleHamiltonian(size=L, hopping=J, h=h, potential_values=p.copy())


@dataclass(frozen=True)
class Propagator:
    """One-step unitary k = exp(-i h dt), stored dense and reused for all steps."""

    k: np.ndarray = field(repr=False)
    dt: float

    def __post_init__(self) -> None:
        self.k.flags.writeable = False


_UNITARITY_TOL = 1e-10


def build_propagator(ham: SingleParticleHamiltonian, dt: float) -> Propagator:
    """exp(-i h dt) via dense eigendecomposition; validated unitary to 1e-10."""
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    try:
        energies, modes = np.linalg.eigh(ham.h)
    except np.linalg.LinAlgError as err:
        raise NumericalError(
            f"eigendecomposition failed for L={ham.size}, J={ham.hopping}: {err}"
        ) from err
    phases = np.exp(-1j * energies * dt)
    k = (modes * phases) @ modes.conj().T
    defect = np.max(np.abs(k.conj().T @ k - np.eye(ham.size)))
    if defect > _UNITARITY_TOL:
        raise NumericalError(
            f"propagator unitarity defect {defect:.3e} exceeds {_UNITARITY_TOL} "
            f"(L={ham.size}, dt={dt})"
        )
    return Propagator(k=k, dt=dt)
