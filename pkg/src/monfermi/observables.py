"""Entanglement observables of a Slater state.

Everything is derived from the two-point correlation matrix: subsystem
entropies from subblock spectra, mutual information between two antipodal
intervals, and the squared off-diagonal correlator measured from the chain
center.  Entropies are in nats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import SlaterState, correlation_matrix

ZETA_CLAMP = 1e-12


@dataclass(frozen=True)
class PartitionGeometry:
    """Two disjoint half-open site intervals [a0, a1) and [b0, b1)."""

    a_range: tuple[int, int]
    b_range: tuple[int, int]

    def __post_init__(self) -> None:
        (a0, a1), (b0, b1) = self.a_range, self.b_range
        if not (0 <= a0 < a1 and 0 <= b0 < b1):
            raise ValueError(f"degenerate intervals {self.a_range}, {self.b_range}")
        if a0 < b1 and b0 < a1:
            raise ValueError(f"intervals {self.a_range} and {self.b_range} overlap")

    @property
    def a_sites(self) -> np.ndarray:
        return np.arange(*self.a_range)

    @property
    def b_sites(self) -> np.ndarray:
        return np.arange(*self.b_range)


def _region_sites(region, L: int) -> np.ndarray:
    """Normalize a region (an (start, stop) pair or a site collection) to indices."""
    if isinstance(region, tuple) and len(region) == 2 and all(isinstance(x, (int, np.integer)) for x in region):
        sites = np.arange(region[0], region[1])
    else:
        sites = np.asarray(sorted(set(int(s) for s in np.atleast_1d(region))))
    if sites.size == 0:
        raise ValueError("region is empty")
    if sites.min() < 0 or sites.max() >= L:
        raise ValueError(f"region {sites} exceeds chain of {L} sites")
    return sites


def binary_entropy_sum(zetas: np.ndarray) -> float:
    """-sum [z ln z + (1-z) ln(1-z)] with values clamped away from {0, 1}
    contributing zero."""
    z = np.clip(np.real(zetas), 0.0, 1.0)
    inside = (z > ZETA_CLAMP) & (z < 1.0 - ZETA_CLAMP)
    z = z[inside]
    if z.size == 0:
        return 0.0
    return float(-np.sum(z * np.log(z) + (1.0 - z) * np.log1p(-z)))


def entropy_from_correlation(d: np.ndarray, region) -> float:
    """Entanglement entropy of `region` from the full correlation matrix."""
    sites = _region_sites(region, d.shape[0])
    block = d[np.ix_(sites, sites)]
    return binary_entropy_sum(np.linalg.eigvalsh(block))


def entanglement_entropy(state: SlaterState, region) -> float:
    """Von Neumann entropy (nats) of the reduced state on `region`."""
    return entropy_from_correlation(correlation_matrix(state), region)


def entropy_profile_from_correlation(d: np.ndarray) -> np.ndarray:
    """S(l) for left blocks [0, l), l = 1..L-1, via subblock eigensolves.

    The correlation matrix of a pure Slater state is a projector, so the
    entropy of [0, l) equals that of its complement [l, L); each cut is
    diagonalized on the smaller of the two blocks (cross-checked against the
    literal left blocks and the many-body oracle in the tests).
    """
    L = d.shape[0]
    out = np.empty(L - 1)
    for ell in range(1, L):
        block = d[:ell, :ell] if ell <= L - ell else d[ell:, ell:]
        out[ell - 1] = binary_entropy_sum(np.linalg.eigvalsh(block))
    return out


def entropy_profile(state: SlaterState) -> np.ndarray:
    """Entropy of every left bipartition, computed from one correlation matrix."""
    return entropy_profile_from_correlation(correlation_matrix(state))


def antipodal_geometry(L: int) -> PartitionGeometry:
    """Two L/8-site intervals separated by 3L/8 buffers: A at the left edge,
    B starting at mid-chain."""
    if L % 8 != 0:
        raise ValueError(f"antipodal geometry needs L divisible by 8, got L={L}")
    eighth = L // 8
    return PartitionGeometry(a_range=(0, eighth), b_range=(L // 2, L // 2 + eighth))


def mutual_information_from_correlation(d: np.ndarray, geometry: PartitionGeometry) -> float:
    """I(A:B) = S_A + S_B - S_{A u B} from one correlation matrix."""
    s_a = entropy_from_correlation(d, geometry.a_range)
    s_b = entropy_from_correlation(d, geometry.b_range)
    union = np.concatenate([geometry.a_sites, geometry.b_sites])
    s_ab = entropy_from_correlation(d, union)
    return s_a + s_b - s_ab


def mutual_information(state: SlaterState, geometry: PartitionGeometry) -> float:
    """Mutual information between the two intervals of `geometry`."""
    return mutual_information_from_correlation(correlation_matrix(state), geometry)


def connected_correlation_from_correlation(d: np.ndarray, ell: int) -> float:
    """|<c^dag_{L/2} c_{L/2+ell}>|^2 (the Slater reduction of the density-density
    connected correlator; non-negative by construction)."""
    L = d.shape[0]
    ref = L // 2
    if not 0 <= ref + ell < L:
        raise ValueError(f"offset {ell} puts site {ref + ell} outside the chain")
    return float(np.abs(d[ref, ref + ell]) ** 2)


def connected_correlation(state: SlaterState, ell: int) -> float:
    """Connected correlation at offset `ell` from the central reference site."""
    return connected_correlation_from_correlation(correlation_matrix(state), ell)


def connected_correlation_row(d: np.ndarray) -> np.ndarray:
    """C_ell for ell = 1..L/2-1, measured from the central site."""
    L = d.shape[0]
    ref = L // 2
    ells = np.arange(1, L - ref)
    return np.abs(d[ref, ref + ells]) ** 2
