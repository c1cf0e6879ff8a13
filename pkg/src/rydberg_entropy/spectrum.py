"""Dimensionless Rydberg ladder Hamiltonian and ground-state solvers.

All energies are in units of the Rabi amplitude (the Hamiltonian is
divided through by it), so the drive term carries amplitude 1/2, the
detuning enters as the ratio ``delta_over_omega`` and the van der Waals
interaction as ``(rb_over_a / d_ij)**6`` with ``d_ij`` the grid-unit
distance between sites.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, InvalidArgumentError, ResourceLimitError
from .lattice import Lattice

# Rydberg C6 coefficient in m^6 rad/s; only used when converting the
# dimensionless knobs back to hardware units for reporting.
C6_M6_RAD_PER_S = 5.42e-24

# Above this dimension the dispatcher switches from dense diagonalization
# to matrix-free Lanczos (4096 = 6 rungs).
DENSE_DISPATCH_LIMIT = 4096

# Hard cap for materializing a dense matrix (2**14).
DENSE_HARD_LIMIT = 16384

# Relative gap below which the ground space is flagged as degenerate.
DEGENERACY_RTOL = 1e-8


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless Hamiltonian knobs."""

    delta_over_omega: float
    rb_over_a: float
    n_rungs: int
    phi: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.delta_over_omega):
            raise InvalidArgumentError("delta_over_omega must be finite")
        if self.rb_over_a < 0:
            raise InvalidArgumentError("rb_over_a must be >= 0")
        if self.n_rungs < 1:
            raise InvalidArgumentError("n_rungs must be >= 1")


def blockade_radius_meters(omega_rad_per_s: float) -> float:
    """R_b = (C6 / Omega)**(1/6) for a given Rabi amplitude in rad/s."""
    if omega_rad_per_s <= 0:
        raise InvalidArgumentError("omega must be positive")
    return (C6_M6_RAD_PER_S / omega_rad_per_s) ** (1.0 / 6.0)


class HamiltonianOperator:
    """Matrix-free Hamiltonian over the 2**n_sites occupation basis.

    The diagonal holds detuning plus interaction energies; the
    off-diagonal action flips one site at a time with amplitude 1/2
    (real, since the laser phase is fixed at zero).  The dense matrix is
    never materialized by ``matvec``.
    """

    def __init__(self, params: SystemParams, lattice: Lattice):
        if lattice.n_rungs != params.n_rungs:
            raise InvalidArgumentError(
                f"lattice has {lattice.n_rungs} rungs but params declare {params.n_rungs}"
            )
        if params.phi != 0.0:
            raise InvalidArgumentError(
                "only phi = 0 is supported (real-amplitude ground states)"
            )
        self.params = params
        self.lattice = lattice
        self.n_sites = lattice.n_sites
        self.dimension = 1 << self.n_sites
        self.diagonal = self._build_diagonal()

    def _build_diagonal(self) -> np.ndarray:
        n = self.n_sites
        idx = np.arange(self.dimension, dtype=np.int64)
        occ = ((idx[:, None] >> np.arange(n)) & 1).astype(np.uint8)
        diag = -self.params.delta_over_omega * occ.sum(axis=1).astype(np.float64)
        pos = self.lattice.position_array()
        v6 = self.params.rb_over_a ** 6
        if v6 != 0.0:
            for i in range(n):
                for j in range(i + 1, n):
                    d2 = float(np.sum((pos[i] - pos[j]) ** 2))
                    diag += (v6 / d2 ** 3) * (occ[:, i] & occ[:, j])
        return diag

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if v.shape != (self.dimension,):
            raise InvalidArgumentError(
                f"vector has shape {v.shape}, expected ({self.dimension},)"
            )
        out = self.diagonal * v
        # Bit i is the occupation of site i, so flipping site i reverses
        # the middle axis of a (2**(n-1-i), 2, 2**i) view.
        for i in range(self.n_sites):
            w = v.reshape(1 << (self.n_sites - 1 - i), 2, 1 << i)
            out.reshape(w.shape)[:] += 0.5 * w[:, ::-1, :]
        return out

    def to_dense(self) -> np.ndarray:
        if self.dimension > DENSE_HARD_LIMIT:
            raise ResourceLimitError(
                f"refusing to materialize a {self.dimension}x{self.dimension} dense matrix"
            )
        h = np.diag(self.diagonal)
        idx = np.arange(self.dimension)
        for i in range(self.n_sites):
            h[idx, idx ^ (1 << i)] += 0.5
        return h


@dataclass(frozen=True)
class GroundState:
    """Real ground-state amplitudes in the occupation basis."""

    amplitudes: np.ndarray
    energy: float
    gap: float | None = None
    degenerate: bool = False

    @property
    def n_sites(self) -> int:
        return int(round(np.log2(len(self.amplitudes))))


def _finish(amplitudes: np.ndarray, energy: float, gap: float | None) -> GroundState:
    amplitudes = amplitudes / np.linalg.norm(amplitudes)
    degenerate = bool(
        gap is not None and gap < DEGENERACY_RTOL * max(1.0, abs(energy))
    )
    return GroundState(
        amplitudes=amplitudes, energy=float(energy), gap=gap, degenerate=degenerate
    )


def build_hamiltonian(params: SystemParams, lattice: Lattice) -> HamiltonianOperator:
    return HamiltonianOperator(params, lattice)


def ground_state_dense(hamiltonian: HamiltonianOperator) -> GroundState:
    """Lowest eigenpair by dense symmetric diagonalization."""
    h = hamiltonian.to_dense()
    if hamiltonian.dimension >= 2:
        vals, vecs = scipy.linalg.eigh(h, subset_by_index=[0, 1])
        gap = float(vals[1] - vals[0])
    else:
        vals, vecs = np.linalg.eigh(h)
        gap = None
    v = vecs[:, 0]
    return _finish(v, vals[0], gap)


def ground_state_lanczos(
    hamiltonian: HamiltonianOperator,
    tol: float = 1e-10,
    max_iter: int = 5000,
    seed: int = 0,
) -> GroundState:
    """Lowest eigenpair by Lanczos with full reorthogonalization.

    Convergence is declared when the residual estimate for the lowest
    Ritz pair drops to ``tol``; the assembled eigenvector's true
    residual is what the returned energy refers to.  Deterministic for a
    given seed.
    """
    if tol <= 0:
        raise InvalidArgumentError("tol must be positive")
    dim = hamiltonian.dimension
    if dim < 2:
        raise InvalidArgumentError("dimension must be >= 2")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    max_k = min(max_iter, dim)
    basis = np.empty((min(max_k, 128), dim))  # grown on demand
    basis[0] = v
    alphas = np.empty(max_k)
    betas = np.empty(max_k)
    best_residual = np.inf
    check_interval = 5
    # Once beta falls to rounding noise relative to the operator scale the
    # Krylov space is exhausted and the Ritz pair is exact to working
    # precision; continuing would orthonormalize noise.
    scale = float(np.max(np.abs(hamiltonian.diagonal))) + hamiltonian.n_sites
    floor = 1e3 * np.finfo(float).eps * max(1.0, scale)
    w = hamiltonian.matvec(v)
    for k in range(max_k):
        alphas[k] = v @ w
        w -= alphas[k] * v
        # Full reorthogonalization keeps the basis numerically orthogonal
        # (it subsumes the explicit three-term recurrence subtraction);
        # projecting twice is required for stability when the diagonal
        # spread is large.
        w -= basis[: k + 1].T @ (basis[: k + 1] @ w)
        w -= basis[: k + 1].T @ (basis[: k + 1] @ w)
        beta = float(np.linalg.norm(w))
        exhausted = beta < floor or k + 1 in (dim, max_k)
        if exhausted or (k + 1) % check_interval == 0:
            n_low = min(2, k + 1)
            ritz, s = scipy.linalg.eigh_tridiagonal(
                alphas[: k + 1], betas[:k], select="i", select_range=(0, n_low - 1)
            )
            residual = abs(beta * s[-1, 0])
            best_residual = min(best_residual, residual)
            if residual <= tol or beta < floor or k + 1 == dim:
                vec = basis[: k + 1].T @ s[:, 0]
                gap = float(ritz[1] - ritz[0]) if len(ritz) > 1 else None
                return _finish(vec, ritz[0], gap)
        if exhausted:
            break
        v = w / beta
        betas[k] = beta
        if k + 1 == basis.shape[0]:
            basis = np.vstack([basis, np.empty_like(basis[: min(basis.shape[0], max_k - basis.shape[0])])])
        basis[k + 1] = v
        w = hamiltonian.matvec(v)
    raise ConvergenceError(
        f"Lanczos did not reach tol={tol} in {max_k} iterations "
        f"(best residual {best_residual:.3e})",
        best_residual=best_residual,
    )


@dataclass(frozen=True)
class SolverConfig:
    """Controls dense/Lanczos dispatch in :func:`ground_state`."""

    force: str | None = None  # None | "dense" | "lanczos"
    dense_limit: int = DENSE_HARD_LIMIT
    tol: float = 1e-10
    max_iter: int = 5000
    seed: int = 0


def ground_state(
    params: SystemParams,
    lattice: Lattice,
    config: SolverConfig | None = None,
) -> GroundState:
    """Dense diagonalization up to dimension 4096, Lanczos above."""
    config = config or SolverConfig()
    h = build_hamiltonian(params, lattice)
    if config.force == "dense":
        if h.dimension > config.dense_limit:
            raise ResourceLimitError(
                f"dense solve forced but dimension {h.dimension} exceeds limit {config.dense_limit}"
            )
        return ground_state_dense(h)
    if config.force == "lanczos":
        return ground_state_lanczos(h, tol=config.tol, max_iter=config.max_iter, seed=config.seed)
    if config.force is not None:
        raise InvalidArgumentError(f"unknown solver {config.force!r}")
    if h.dimension <= DENSE_DISPATCH_LIMIT:
        return ground_state_dense(h)
    return ground_state_lanczos(h, tol=config.tol, max_iter=config.max_iter, seed=config.seed)
