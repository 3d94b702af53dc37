"""Independent reference computations used only by the tests."""
import itertools

import numpy as np

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def random_traceless_hermitian(rng, scale=1.0):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = (a + a.conj().T) / 2
    h -= np.trace(h) / 4 * np.eye(4)
    return scale * h


def random_density(rng, dim=2):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def partial_trace_loops(m, keep):
    """Element-by-element partial trace over the other qubit."""
    out = np.zeros((2, 2), dtype=complex)
    for i, j, k in itertools.product(range(2), repeat=3):
        if keep == "A":
            out[i, j] += m[2 * i + k, 2 * j + k]
        else:
            out[i, j] += m[2 * k + i, 2 * k + j]
    return out


def svd_classical(corr):
    """Max of (n_a.T.n_b)^2/2 over unit vectors is the top singular value squared over 2."""
    return float(np.linalg.svd(corr, compute_uv=False)[0] ** 2 / 2)


def brute_force_measured_max(delta_matrix, n_theta=13, n_phi=24):
    """Exhaustive scan of the measured mutual information through explicit projectors."""
    def projectors(n):
        ns = n[0] * SX + n[1] * SY + n[2] * SZ
        return (np.eye(2) + ns) / 2, (np.eye(2) - ns) / 2

    def info(m):
        r = m.reshape(2, 2, 2, 2)
        da, db = np.einsum("ijkj->ik", r), np.einsum("ijil->jl", r)
        return (2 * np.trace(m @ m) - np.trace(da @ da) - np.trace(db @ db)).real

    dirs = []
    for th in np.linspace(0, np.pi / 2, n_theta):
        for ph in np.arange(n_phi) * 2 * np.pi / n_phi:
            dirs.append(np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)]))
    best = -np.inf
    for na in dirs:
        pa = projectors(na)
        for nb in dirs:
            pb = projectors(nb)
            chi = sum(np.kron(x, y) @ delta_matrix @ np.kron(x, y) for x in pa for y in pb)
            best = max(best, info(chi))
    return best
