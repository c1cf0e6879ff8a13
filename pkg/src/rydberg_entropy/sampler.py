"""Finite-shot measurement simulation and experimental error channels.

Shots are stored as a (n_shots, n_sites) uint8 array; column ``i`` is the
occupation of site ``i`` under the frozen lattice ordering.  In the text
export, the leftmost character of each line is site 0 (most significant
bit = site 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgumentError, ParseError
from .lattice import Bipartition, Lattice, boundary_sites
from .quantum_info import BasisDistribution

DEFAULT_SHOTS = 10000


@dataclass(frozen=True)
class ShotSet:
    """A multiset of measured bitstrings plus the noise that produced it."""

    shots: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.shots.ndim != 2 or self.shots.shape[0] < 1:
            raise InvalidArgumentError("shots must be a nonempty (n_shots, n_sites) array")

    @property
    def n_shots(self) -> int:
        return self.shots.shape[0]

    @property
    def n_sites(self) -> int:
        return self.shots.shape[1]


def sample_bitstrings(
    distribution: BasisDistribution, n_shots: int, seed
) -> ShotSet:
    """Draw i.i.d. measurement outcomes; deterministic given the seed."""
    if n_shots < 1:
        raise InvalidArgumentError("n_shots must be >= 1")
    rng = np.random.default_rng(seed)
    n = distribution.n_sites
    idx = rng.choice(1 << n, size=n_shots, p=distribution.probabilities)
    shots = ((idx[:, None] >> np.arange(n)) & 1).astype(np.uint8)
    return ShotSet(shots=shots, provenance={"n_shots": int(n_shots), "seed": seed})


def apply_bitflip_noise(shot_set: ShotSet, p_flip: float, seed) -> ShotSet:
    """Flip each recorded bit independently with probability p_flip."""
    if not 0.0 <= p_flip <= 1.0:
        raise InvalidArgumentError("p_flip must be in [0, 1]")
    rng = np.random.default_rng(seed)
    flips = (rng.random(shot_set.shots.shape) < p_flip).astype(np.uint8)
    provenance = dict(shot_set.provenance)
    provenance["bitflip_p"] = float(p_flip)
    provenance["bitflip_seed"] = seed
    return ShotSet(shots=shot_set.shots ^ flips, provenance=provenance)


@dataclass(frozen=True)
class BoundaryPerturbation:
    """Result of the boundary misclassification channel."""

    bipartition: Bipartition
    flipped_sites: tuple[int, ...]
    exhausted: bool = False


def perturb_bipartition_boundary(
    bipartition: Bipartition,
    lattice: Lattice,
    p_flip: float,
    seed,
    max_resamples: int = 100,
) -> BoundaryPerturbation:
    """Misclassify boundary atoms: flip each boundary site's subsystem
    label with probability p_flip.

    Non-boundary sites are never touched.  If a draw would empty either
    subsystem it is redrawn (up to ``max_resamples`` times); after that
    the original bipartition is returned with ``exhausted`` set.
    """
    if not 0.0 <= p_flip <= 1.0:
        raise InvalidArgumentError("p_flip must be in [0, 1]")
    rng = np.random.default_rng(seed)
    boundary = sorted(boundary_sites(lattice, bipartition))
    n = len(bipartition.mask)
    for _ in range(max_resamples + 1):
        flips = [s for s in boundary if rng.random() < p_flip]
        mask = list(bipartition.mask)
        for s in flips:
            mask[s] = not mask[s]
        n_a = sum(mask)
        if 1 <= n_a <= n - 1:
            return BoundaryPerturbation(
                bipartition=Bipartition(tuple(mask)), flipped_sites=tuple(flips)
            )
    return BoundaryPerturbation(
        bipartition=bipartition, flipped_sites=(), exhausted=True
    )


def empirical_distribution(shot_set: ShotSet) -> BasisDistribution:
    """Relative outcome frequencies as a BasisDistribution."""
    n = shot_set.n_sites
    weights = (1 << np.arange(n, dtype=np.int64))
    idx = shot_set.shots.astype(np.int64) @ weights
    counts = np.bincount(idx, minlength=1 << n).astype(np.float64)
    p = counts / counts.sum()
    return BasisDistribution(probabilities=p, n_sites=n)


def write_shots(path, shot_set: ShotSet) -> None:
    """One bitstring per line; leftmost character = site 0."""
    with open(path, "w") as fh:
        fh.write(f"# n_sites={shot_set.n_sites} ordering=leftmost-char-is-site-0\n")
        for row in shot_set.shots:
            fh.write("".join("1" if b else "0" for b in row) + "\n")


def read_shots(path) -> ShotSet:
    rows = []
    n_sites = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line[1:].split():
                    if token.startswith("n_sites="):
                        n_sites = int(token.split("=", 1)[1])
                continue
            if set(line) - {"0", "1"}:
                raise ParseError(f"line {lineno}: not a bitstring", line_number=lineno)
            if n_sites is not None and len(line) != n_sites:
                raise ParseError(
                    f"line {lineno}: expected {n_sites} bits, got {len(line)}",
                    line_number=lineno,
                )
            rows.append([1 if c == "1" else 0 for c in line])
    if not rows:
        raise ParseError("no shots in file")
    return ShotSet(shots=np.asarray(rows, dtype=np.uint8), provenance={"source": str(path)})
