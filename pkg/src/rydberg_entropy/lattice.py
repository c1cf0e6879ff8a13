"""Two-leg ladder geometry and bipartitions.

Site ordering convention (frozen; bitstring files and amplitude-vector
reshapes depend on it): rung ``i`` contributes site ``2*i`` on the lower
leg (y = 0) and site ``2*i + 1`` on the upper leg (y = 2).  The x-spacing
is 1 grid unit and the y-spacing is 2 grid units.  Bit ``i`` of a basis
state index is the occupation of site ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class Lattice:
    """A two-leg ladder of ``2 * n_rungs`` atoms on a grid."""

    n_rungs: int
    positions: tuple[tuple[float, float], ...]

    @property
    def n_sites(self) -> int:
        return 2 * self.n_rungs

    def position_array(self) -> np.ndarray:
        return np.asarray(self.positions, dtype=float)

    def distance(self, i: int, j: int) -> float:
        (xi, yi), (xj, yj) = self.positions[i], self.positions[j]
        return float(np.hypot(xi - xj, yi - yj))


@dataclass(frozen=True)
class Bipartition:
    """A split of the lattice into subsystems A (mask true) and B."""

    mask: tuple[bool, ...]

    def __post_init__(self):
        n = len(self.mask)
        if not 1 <= self.n_a <= n - 1:
            raise InvalidArgumentError(
                f"bipartition must leave both subsystems non-empty, got n_A={self.n_a} of {n}"
            )

    @property
    def n_a(self) -> int:
        return sum(self.mask)

    @property
    def n_b(self) -> int:
        return len(self.mask) - self.n_a

    @property
    def sites_a(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.mask) if m)

    @property
    def sites_b(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.mask) if not m)

    def complement(self) -> "Bipartition":
        return Bipartition(tuple(not m for m in self.mask))


def build_ladder(n_rungs: int) -> Lattice:
    """Build the two-leg ladder with the frozen site ordering."""
    if n_rungs < 1:
        raise InvalidArgumentError(f"n_rungs must be >= 1, got {n_rungs}")
    positions = []
    for i in range(n_rungs):
        positions.append((float(i), 0.0))
        positions.append((float(i), 2.0))
    return Lattice(n_rungs=n_rungs, positions=tuple(positions))


def random_bipartition(lattice: Lattice, rng_seed) -> Bipartition:
    """Draw a uniformly sized, then uniformly chosen, subsystem A.

    The size is uniform on {1, ..., n_sites - 1} so that small and large
    subsystems are equally represented; the subset need not be contiguous.
    Deterministic given the seed.
    """
    n = lattice.n_sites
    if n < 2:
        raise InvalidArgumentError("need at least 2 sites to bipartition")
    rng = np.random.default_rng(rng_seed)
    size = int(rng.integers(1, n))
    sites = rng.choice(n, size=size, replace=False)
    mask = [False] * n
    for s in sites:
        mask[int(s)] = True
    return Bipartition(tuple(mask))


def symmetric_bipartition(lattice: Lattice) -> Bipartition:
    """A = the left half of the rungs (all sites with x < n_rungs / 2)."""
    if lattice.n_rungs % 2 != 0:
        raise InvalidArgumentError(
            f"symmetric bipartition needs an even rung count, got {lattice.n_rungs}"
        )
    half = lattice.n_rungs / 2
    mask = tuple(x < half for x, _y in lattice.positions)
    return Bipartition(mask)


def boundary_sites(lattice: Lattice, bipartition: Bipartition) -> set[int]:
    """Sites with an opposite-subsystem site within 2 grid units.

    The 2-unit radius covers x-neighbors (distance 1) and rung partners
    (distance 2), the nearest-neighbor scales of this lattice.
    """
    pos = lattice.position_array()
    mask = np.asarray(bipartition.mask)
    d = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
    cross = mask[:, None] != mask[None, :]
    near = (d <= 2.0 + 1e-12) & cross
    np.fill_diagonal(near, False)
    return set(np.nonzero(near.any(axis=1))[0].tolist())
