import numpy as np
import pytest

from rydberg_entropy import (
    ConvergenceError,
    InvalidArgumentError,
    ResourceLimitError,
    SolverConfig,
    SystemParams,
    build_hamiltonian,
    build_ladder,
    ground_state,
    ground_state_dense,
    ground_state_lanczos,
)

from oracles import kron_hamiltonian


def _hamiltonian(delta, rb, n_rungs):
    params = SystemParams(delta_over_omega=delta, rb_over_a=rb, n_rungs=n_rungs)
    return build_hamiltonian(params, build_ladder(n_rungs))


def test_diagonal_single_rung_fully_excited():
    h = _hamiltonian(1.0, 2.0, 1)
    # |ee>: index 0b11; detuning -2 plus rung interaction (2/2)**6 = 1.
    assert h.diagonal[0b11] == pytest.approx(-1.0)


def test_diagonal_vacuum_is_zero():
    h = _hamiltonian(3.7, 4.2, 2)
    assert h.diagonal[0] == 0.0


def test_matvec_on_vacuum_drives_single_excitations():
    h = _hamiltonian(0.0, 0.0, 2)
    v = np.zeros(16)
    v[0] = 1.0
    out = h.matvec(v)
    expected = np.zeros(16)
    for i in range(4):
        expected[1 << i] = 0.5
    np.testing.assert_allclose(out, expected)


@pytest.mark.parametrize("n_rungs", [1, 2, 3])
def test_hermiticity_on_random_vectors(n_rungs):
    h = _hamiltonian(2.3, 1.7, n_rungs)
    rng = np.random.default_rng(n_rungs)
    for _ in range(100):
        x = rng.standard_normal(h.dimension)
        y = rng.standard_normal(h.dimension)
        assert x @ h.matvec(y) == pytest.approx(h.matvec(x) @ y, abs=1e-12)


def test_mismatched_lattice_rejected():
    params = SystemParams(delta_over_omega=0.0, rb_over_a=0.0, n_rungs=2)
    with pytest.raises(InvalidArgumentError):
        build_hamiltonian(params, build_ladder(3))


def test_nonzero_phi_rejected():
    params = SystemParams(delta_over_omega=0.0, rb_over_a=0.0, n_rungs=1, phi=0.3)
    with pytest.raises(InvalidArgumentError):
        build_hamiltonian(params, build_ladder(1))


def test_dense_decoupled_single_rung():
    gs = ground_state_dense(_hamiltonian(0.0, 0.0, 1))
    assert gs.energy == pytest.approx(-1.0, abs=1e-12)
    # Product of (|g> - |e>)/sqrt(2) per site, up to global sign.
    expected = np.full(4, 0.25) * np.array([1, -1, -1, 1]) * 2
    overlap = abs(gs.amplitudes @ (expected / np.linalg.norm(expected)))
    assert overlap == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("n_rungs", [1, 2, 3])
def test_decoupled_energy_is_minus_half_per_site(n_rungs):
    gs = ground_state_dense(_hamiltonian(0.0, 0.0, n_rungs))
    assert gs.energy == pytest.approx(-n_rungs, abs=1e-12)


def test_dense_matches_kron_oracle():
    h = _hamiltonian(2.0, 1.5, 2)
    gs = ground_state_dense(h)
    lat = build_ladder(2)
    oracle = np.linalg.eigvalsh(kron_hamiltonian(2.0, 1.5, lat.positions))
    assert gs.energy == pytest.approx(oracle[0], abs=1e-10)
    assert gs.gap == pytest.approx(oracle[1] - oracle[0], abs=1e-9)


def test_dense_to_dense_matrix_matches_matvec():
    h = _hamiltonian(1.1, 0.9, 2)
    dense = h.to_dense()
    rng = np.random.default_rng(0)
    v = rng.standard_normal(h.dimension)
    np.testing.assert_allclose(dense @ v, h.matvec(v), atol=1e-12)


@pytest.mark.parametrize("n_rungs", [1, 2, 3])
def test_eigenpair_residual(n_rungs):
    h = _hamiltonian(3.0, 2.5, n_rungs)
    gs = ground_state_dense(h)
    residual = np.linalg.norm(h.matvec(gs.amplitudes) - gs.energy * gs.amplitudes)
    assert residual <= 1e-8


def test_lanczos_single_rung_exact():
    gs = ground_state_lanczos(_hamiltonian(0.0, 0.0, 1), tol=1e-10)
    assert gs.energy == pytest.approx(-1.0, abs=1e-10)


@pytest.mark.parametrize("case", range(6))
def test_lanczos_agrees_with_dense(case):
    rng = np.random.default_rng(900 + case)
    n_rungs = int(rng.integers(1, 7))
    h = _hamiltonian(float(rng.uniform(0, 6)), float(rng.uniform(0.1, 5)), n_rungs)
    dense = ground_state_dense(h)
    lanczos = ground_state_lanczos(h, tol=1e-10, seed=case)
    assert lanczos.energy == pytest.approx(dense.energy, abs=1e-8)
    assert abs(abs(dense.amplitudes @ lanczos.amplitudes) - 1.0) <= 1e-6


def test_lanczos_max_iter_exhaustion_raises():
    with pytest.raises(ConvergenceError) as exc:
        ground_state_lanczos(_hamiltonian(2.5, 2.0, 6), tol=1e-12, max_iter=1)
    assert exc.value.best_residual is not None


def test_lanczos_variational_bound():
    h = _hamiltonian(1.5, 2.0, 3)
    tol = 1e-10
    gs = ground_state_lanczos(h, tol=tol)
    rng = np.random.default_rng(3)
    for _ in range(20):
        v = rng.standard_normal(h.dimension)
        v /= np.linalg.norm(v)
        assert gs.energy <= v @ h.matvec(v) + tol


def test_dispatch_dense_at_six_rungs():
    # 6 rungs is dim 4096, the dense/Lanczos boundary.
    from rydberg_entropy.spectrum import DENSE_DISPATCH_LIMIT

    assert _hamiltonian(0.0, 0.0, 6).dimension == DENSE_DISPATCH_LIMIT


def test_dispatch_forced_dense_respects_limit():
    params = SystemParams(delta_over_omega=1.0, rb_over_a=1.0, n_rungs=8)
    with pytest.raises(ResourceLimitError):
        ground_state(params, build_ladder(8), SolverConfig(force="dense", dense_limit=4096))


def test_dispatch_forced_modes_agree():
    params = SystemParams(delta_over_omega=1.3, rb_over_a=1.1, n_rungs=2)
    lat = build_ladder(2)
    dense = ground_state(params, lat, SolverConfig(force="dense"))
    lanczos = ground_state(params, lat, SolverConfig(force="lanczos"))
    auto = ground_state(params, lat)
    assert auto.energy == pytest.approx(dense.energy, abs=1e-12)
    assert lanczos.energy == pytest.approx(dense.energy, abs=1e-8)


def test_invalid_params_rejected():
    with pytest.raises(InvalidArgumentError):
        SystemParams(delta_over_omega=float("nan"), rb_over_a=1.0, n_rungs=1)
    with pytest.raises(InvalidArgumentError):
        SystemParams(delta_over_omega=0.0, rb_over_a=-0.1, n_rungs=1)
