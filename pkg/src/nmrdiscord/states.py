"""Two-qubit deviation and density matrices.

States follow the high-temperature form ``rho = I/4 + eps * delta``. Qubit A
is the first tensor factor (1H in the chloroform mapping), qubit B the second
(13C). Only 2x2 and 4x4 matrices are ever handled.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIGEN_FLOOR = -1e-12

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)
I4 = np.eye(4, dtype=complex)


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class StateValidityError(ValueError):
    """Matrix is not a valid deviation or density matrix."""


def _as_matrix(m, dim: int) -> np.ndarray:
    arr = np.array(m, dtype=complex)
    if arr.shape != (dim, dim):
        raise DomainError(f"expected a {dim}x{dim} matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix has non-finite entries")
    arr.setflags(write=False)
    return arr


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


@dataclass(frozen=True)
class DeviationMatrix:
    """Traceless Hermitian 4x4 matrix ``delta`` of ``rho = I/4 + eps*delta``.

    Construction rejects (never symmetrizes) inputs that are not Hermitian or
    not traceless within 1e-10.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_matrix(self.matrix, 4)
        if hermiticity_error(m) > HERMITIAN_ATOL:
            raise StateValidityError(
                f"deviation matrix not Hermitian (error {hermiticity_error(m):.3g})"
            )
        if abs(np.trace(m)) > TRACE_ATOL:
            raise StateValidityError(f"deviation matrix not traceless (trace {np.trace(m):.3g})")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def zero(cls) -> "DeviationMatrix":
        return cls(np.zeros((4, 4), dtype=complex))

    def __add__(self, other: "DeviationMatrix") -> "DeviationMatrix":
        return DeviationMatrix(self.matrix + other.matrix)

    def scaled(self, k: float) -> "DeviationMatrix":
        return DeviationMatrix(k * self.matrix)

    def is_x_type(self, atol: float = 0.0) -> bool:
        mask = ~(np.eye(4, dtype=bool) | np.fliplr(np.eye(4, dtype=bool)))
        return bool(np.all(np.abs(self.matrix[mask]) <= atol))


@dataclass(frozen=True)
class DensityMatrix:
    """Two-qubit density matrix, optionally tagged with the ``eps`` it was built from."""

    matrix: np.ndarray
    epsilon: Optional[float] = None

    def __post_init__(self):
        m = _as_matrix(self.matrix, 4)
        if hermiticity_error(m) > HERMITIAN_ATOL:
            raise StateValidityError("density matrix not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_ATOL:
            raise StateValidityError(f"density matrix trace {np.trace(m).real:.12g} != 1")
        lo = float(np.linalg.eigvalsh(m).min())
        if lo < EIGEN_FLOOR:
            raise StateValidityError(f"density matrix has negative eigenvalue {lo:.3g}")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class BellDiagonalCoeffs:
    c_x: float
    c_y: float
    c_z: float

    def __post_init__(self):
        for name in ("c_x", "c_y", "c_z"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or abs(v) > 1.0:
                raise DomainError(f"{name}={v} outside [-1, 1]")
            object.__setattr__(self, name, v)

    def as_array(self) -> np.ndarray:
        return np.array([self.c_x, self.c_y, self.c_z])


@dataclass(frozen=True)
class BlochDecomposition:
    """``delta = (a.sigma x I + I x b.sigma + sum_ij corr_ij sigma_i x sigma_j) / 4``.

    ``local_a[i] = tr[delta sigma_i x I]``, ``local_b[j] = tr[delta I x sigma_j]``
    and ``corr[i, j] = tr[delta sigma_i x sigma_j]``.
    """

    local_a: np.ndarray
    local_b: np.ndarray
    corr: np.ndarray = field(repr=True)

    def reconstruct(self) -> DeviationMatrix:
        m = np.zeros((4, 4), dtype=complex)
        for i, s in enumerate(PAULIS):
            m += self.local_a[i] * np.kron(s, I2)
            m += self.local_b[i] * np.kron(I2, s)
            for j, t in enumerate(PAULIS):
                m += self.corr[i, j] * np.kron(s, t)
        return DeviationMatrix(m / 4.0)


def bell_diagonal_deviation(c: BellDiagonalCoeffs) -> DeviationMatrix:
    """Deviation matrix ``(1/4) sum_i c_i sigma_i x sigma_i``."""
    m = np.zeros((4, 4), dtype=complex)
    for ci, s in zip(c.as_array(), PAULIS):
        m += ci * np.kron(s, s)
    m /= 4.0
    # Pauli products are exactly X-shaped; clear rounding dust so the shape is exact.
    mask = np.eye(4, dtype=bool) | np.fliplr(np.eye(4, dtype=bool))
    m[~mask] = 0.0
    return DeviationMatrix(m)


def compose_density(delta: DeviationMatrix, epsilon: float) -> DensityMatrix:
    if not (0.0 < epsilon <= 0.1):
        raise DomainError(f"epsilon={epsilon} outside (0, 0.1]")
    return DensityMatrix(I4 / 4.0 + epsilon * delta.matrix, epsilon=float(epsilon))


def extract_deviation(rho: DensityMatrix) -> DeviationMatrix:
    if not rho.epsilon:
        raise DomainError("density matrix carries no nonzero epsilon")
    return DeviationMatrix((rho.matrix - I4 / 4.0) / rho.epsilon)


def partial_trace(m: np.ndarray, keep: str) -> np.ndarray:
    """Reduce a 4x4 operator to qubit ``keep`` ('A' or 'B')."""
    t = np.asarray(m, dtype=complex).reshape(2, 2, 2, 2)
    if keep.upper() == "A":
        return np.einsum("ijkj->ik", t)
    if keep.upper() == "B":
        return np.einsum("ijil->jl", t)
    raise DomainError(f"unknown subsystem {keep!r}")


def bloch_decompose(delta: DeviationMatrix) -> BlochDecomposition:
    m = delta.matrix
    a = np.array([np.trace(m @ np.kron(s, I2)).real for s in PAULIS])
    b = np.array([np.trace(m @ np.kron(I2, s)).real for s in PAULIS])
    corr = np.array([[np.trace(m @ np.kron(s, t)).real for t in PAULIS] for s in PAULIS])
    return BlochDecomposition(a, b, corr)


# ---------------------------------------------------------------- JSON format

def matrix_to_json(m: np.ndarray, epsilon: Optional[float] = None) -> dict:
    out = {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}
    if epsilon is not None:
        out["epsilon"] = epsilon
    return out


def matrix_from_json(obj: dict) -> tuple[np.ndarray, Optional[float]]:
    try:
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed state object: {exc}") from exc
    if re.shape != (4, 4) or im.shape != (4, 4):
        raise DomainError("state object must hold 4x4 're' and 'im' arrays")
    eps = obj.get("epsilon")
    return re + 1j * im, (None if eps is None else float(eps))


def deviation_from_json(obj: dict) -> DeviationMatrix:
    m, _ = matrix_from_json(obj)
    return DeviationMatrix(m)
