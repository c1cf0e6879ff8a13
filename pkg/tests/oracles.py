"""Independent brute-force oracles used to freeze expected values.

These deliberately avoid the library's code paths: the Hamiltonian is
assembled from explicit Kronecker products, and the entanglement entropy
comes from an explicit reduced-density-matrix eigendecomposition instead
of the SVD route.
"""

import numpy as np

_I = np.eye(2)
_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_NUM = np.diag([0.0, 1.0])


def _site_operator(single, site, n_sites):
    # Bit k of a basis index is the occupation of site k, so site k acts
    # on the k-th Kronecker factor counted from the right.
    op = np.eye(1)
    for k in range(n_sites):
        op = np.kron(_single_or_id(single, site, k), op)
    return op


def _single_or_id(single, site, k):
    return single if k == site else _I


def kron_hamiltonian(delta_over_omega, rb_over_a, positions):
    """Dense dimensionless ladder Hamiltonian from explicit Kronecker products."""
    n = len(positions)
    dim = 2 ** n
    h = np.zeros((dim, dim))
    for i in range(n):
        h += 0.5 * _site_operator(_SX, i, n)
        h -= delta_over_omega * _site_operator(_NUM, i, n)
    for i in range(n):
        for j in range(i + 1, n):
            d = np.hypot(
                positions[i][0] - positions[j][0], positions[i][1] - positions[j][1]
            )
            h += (rb_over_a / d) ** 6 * (
                _site_operator(_NUM, i, n) @ _site_operator(_NUM, j, n)
            )
    return h


def rho_a_entropy(amplitudes, sites_a, sites_b):
    """Entanglement entropy via explicit rho_A = M M^T eigendecomposition."""
    n = len(sites_a) + len(sites_b)
    idx = np.arange(2 ** n)
    a_idx = np.zeros_like(idx)
    b_idx = np.zeros_like(idx)
    for k, s in enumerate(sites_a):
        a_idx |= ((idx >> s) & 1) << k
    for k, s in enumerate(sites_b):
        b_idx |= ((idx >> s) & 1) << k
    m = np.zeros((2 ** len(sites_a), 2 ** len(sites_b)))
    m[a_idx, b_idx] = amplitudes
    lam = np.linalg.eigvalsh(m @ m.T)
    lam = lam[lam > 1e-12]
    return float(-np.sum(lam * np.log(lam)))


def brute_mutual_information(probabilities, sites_a, sites_b):
    """S_A + S_B - S_AB by direct summation over all joint outcomes."""
    n = len(sites_a) + len(sites_b)

    def marginal(sites):
        out = np.zeros(2 ** len(sites))
        for s, p in enumerate(probabilities):
            key = 0
            for k, site in enumerate(sites):
                key |= ((s >> site) & 1) << k
            out[key] += p
        return out

    def entropy(p):
        p = p[p > 1e-15]
        return float(-np.sum(p * np.log(p)))

    return (
        entropy(marginal(sites_a))
        + entropy(marginal(sites_b))
        - entropy(np.asarray(probabilities))
    )


def random_state(dim, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)
