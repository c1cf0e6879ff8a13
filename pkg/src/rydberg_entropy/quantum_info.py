"""Exact information-theoretic quantities from a ground state.

Everything here uses the natural logarithm, with 0 * ln 0 := 0.  The
amplitude vector is indexed so that bit ``i`` of the basis index is the
occupation of site ``i`` (see :mod:`rydberg_entropy.lattice`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .lattice import Bipartition

# Singular values (squared Schmidt weights) below this are discarded.
SCHMIDT_CUTOFF = 1e-12

NORM_TOL = 1e-6
PROB_SUM_TOL = 1e-6


@dataclass(frozen=True)
class BasisDistribution:
    """A probability distribution over the 2**n_sites bitstrings."""

    probabilities: np.ndarray
    n_sites: int

    def __post_init__(self):
        p = self.probabilities
        if len(p) != 1 << self.n_sites:
            raise InvalidArgumentError(
                f"distribution length {len(p)} does not match n_sites={self.n_sites}"
            )
        if np.any(p < -1e-12):
            raise InvalidArgumentError("probabilities must be nonnegative")
        if abs(float(p.sum()) - 1.0) > 1e-10:
            raise InvalidArgumentError("probabilities must sum to 1")


@dataclass(frozen=True)
class EntropyRecord:
    """Shannon/von Neumann entropies for one (state, bipartition) pair, in nats."""

    s_x_a: float
    s_x_b: float
    s_x_ab: float
    mi: float
    half_mi: float
    s_vn: float = float("nan")


def _entropy_of_weights(p: np.ndarray) -> float:
    p = p[p > SCHMIDT_CUTOFF]
    if len(p) == 0:
        return 0.0
    return float(-np.sum(p * np.log(p)))


def von_neumann_entropy(amplitudes: np.ndarray, bipartition: Bipartition) -> float:
    """Bipartite entanglement entropy via SVD of the reshaped amplitudes.

    The amplitude tensor is transposed so the A-site axes come first,
    reshaped to a 2**n_A by 2**n_B matrix, and the entropy is
    -sum(s**2 ln s**2) over its singular values.
    """
    amplitudes = np.asarray(amplitudes, dtype=float)
    n = len(bipartition.mask)
    if len(amplitudes) != 1 << n:
        raise InvalidArgumentError("state dimension does not match bipartition size")
    norm = np.linalg.norm(amplitudes)
    if abs(norm - 1.0) > NORM_TOL:
        raise InvalidArgumentError(f"state is not normalized (norm {norm})")
    # Axis a of the [2]*n tensor corresponds to site n-1-a (C order puts
    # the most significant bit first).
    tensor = amplitudes.reshape([2] * n)
    axes_a = [n - 1 - s for s in bipartition.sites_a]
    axes_b = [n - 1 - s for s in bipartition.sites_b]
    matrix = tensor.transpose(axes_a + axes_b).reshape(
        1 << bipartition.n_a, 1 << bipartition.n_b
    )
    sv = np.linalg.svd(matrix, compute_uv=False)
    return _entropy_of_weights(sv ** 2)


def basis_probabilities(amplitudes: np.ndarray) -> BasisDistribution:
    amplitudes = np.asarray(amplitudes, dtype=float)
    norm = np.linalg.norm(amplitudes)
    if abs(norm - 1.0) > NORM_TOL:
        raise InvalidArgumentError(f"state is not normalized (norm {norm})")
    p = amplitudes ** 2
    p = p / p.sum()
    n_sites = int(round(np.log2(len(p))))
    return BasisDistribution(probabilities=p, n_sites=n_sites)


def _occupations(n_sites: int) -> np.ndarray:
    idx = np.arange(1 << n_sites, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n_sites)) & 1).astype(np.float64)


def rydberg_probabilities(distribution: BasisDistribution) -> np.ndarray:
    """Per-site excitation probability p_i = sum over states with site i set."""
    n = distribution.n_sites
    p = distribution.probabilities
    out = np.empty(n)
    for i in range(n):
        out[i] = p.reshape(1 << (n - 1 - i), 2, 1 << i)[:, 1, :].sum()
    return out


def two_point_correlations(distribution: BasisDistribution) -> np.ndarray:
    """Connected correlator C_ij = <r_i r_j> - <r_i><r_j>."""
    occ = _occupations(distribution.n_sites)
    p = distribution.probabilities
    first = occ.T @ p
    second = occ.T @ (p[:, None] * occ)
    return second - np.outer(first, first)


def fourth_cross_moment(distribution: BasisDistribution) -> np.ndarray:
    """M_ij = E[(x_i - p_i)**2 (x_j - p_j)**2] over the distribution."""
    occ = _occupations(distribution.n_sites)
    p = distribution.probabilities
    first = occ.T @ p
    dev2 = (occ - first) ** 2
    return dev2.T @ (p[:, None] * dev2)


def shannon_entropy(probabilities: np.ndarray) -> float:
    """-sum p ln p in nats; renormalizes inputs within tolerance of 1."""
    p = np.asarray(probabilities, dtype=float)
    if np.any(p < -1e-12):
        raise InvalidArgumentError("probabilities must be nonnegative")
    total = float(p.sum())
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise InvalidArgumentError(f"probabilities sum to {total}, not 1")
    p = np.clip(p, 0.0, None) / total
    return _entropy_of_weights(p)


def marginal_distribution(
    distribution: BasisDistribution, sites: tuple[int, ...]
) -> np.ndarray:
    """Marginal over the given sites, indexed by their packed bits.

    Bit k of the marginal index is the occupation of ``sorted(sites)[k]``.
    """
    sites = tuple(sorted(sites))
    idx = np.arange(1 << distribution.n_sites, dtype=np.int64)
    sub = np.zeros_like(idx)
    for k, site in enumerate(sites):
        sub |= ((idx >> site) & 1) << k
    return np.bincount(sub, weights=distribution.probabilities, minlength=1 << len(sites))


def classical_mutual_information(
    distribution: BasisDistribution, bipartition: Bipartition
) -> EntropyRecord:
    """Bitstring mutual information across the cut: S_A + S_B - S_AB.

    Both the mutual information and its half are recorded; analyses pick
    one explicitly and default to the half, which is the lower-bound
    comparator for the entanglement entropy.
    """
    if len(bipartition.mask) != distribution.n_sites:
        raise InvalidArgumentError("bipartition does not match distribution size")
    pa = marginal_distribution(distribution, bipartition.sites_a)
    pb = marginal_distribution(distribution, bipartition.sites_b)
    s_a = shannon_entropy(pa)
    s_b = shannon_entropy(pb)
    s_ab = shannon_entropy(distribution.probabilities)
    mi = max(s_a + s_b - s_ab, 0.0)
    return EntropyRecord(s_x_a=s_a, s_x_b=s_b, s_x_ab=s_ab, mi=mi, half_mi=mi / 2.0)
