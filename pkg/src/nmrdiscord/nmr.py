"""NMR state preparation, J-coupling free evolution and the sampling grid."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channels import RelaxationParams
from .states import BellDiagonalCoeffs, DeviationMatrix, DomainError

J_CHLOROFORM = 215.1  # Hz, 1H-13C scalar coupling
ZZ_SIGNS = np.array([1.0, -1.0, -1.0, 1.0])  # diagonal of sigma_z x sigma_z


@dataclass(frozen=True)
class DiagonalPopulations:
    """Deviation-level populations of |00>, |01>, |10>, |11>."""

    pop_a: float
    pop_b: float
    pop_c: float
    pop_d: float

    def __post_init__(self):
        if abs(self.pop_a + self.pop_b + self.pop_c + self.pop_d) > 1e-12:
            raise DomainError("deviation populations must sum to zero")

    def as_array(self) -> np.ndarray:
        return np.array([self.pop_a, self.pop_b, self.pop_c, self.pop_d])


@dataclass(frozen=True)
class TimeGrid:
    times: tuple

    def __post_init__(self):
        ts = tuple(float(t) for t in self.times)
        if not ts or ts[0] != 0.0:
            raise DomainError("time grid must start at 0")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise DomainError("time grid must be strictly increasing")
        object.__setattr__(self, "times", ts)

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self):
        return iter(self.times)

    @property
    def step(self) -> Optional[float]:
        return self.times[1] - self.times[0] if len(self.times) > 1 else None


@dataclass(frozen=True)
class NmrSystemParams:
    j_coupling: float = J_CHLOROFORM
    relaxation: RelaxationParams = field(default_factory=RelaxationParams)
    residual_amplitude: float = 0.0

    def __post_init__(self):
        if not self.j_coupling > 0:
            raise DomainError("J coupling must be positive")
        if self.residual_amplitude < 0:
            raise DomainError("residual amplitude must be >= 0")


def diagonal_deviation(pops: DiagonalPopulations) -> DeviationMatrix:
    return DeviationMatrix(np.diag(pops.as_array()).astype(complex))


def pseudo_epr(delta_diag: DeviationMatrix) -> DeviationMatrix:
    """Map a diagonal deviation matrix onto the X-type form produced by the pseudo-EPR gate."""
    m = delta_diag.matrix
    if np.any(np.abs(m - np.diag(np.diag(m))) > 0):
        raise DomainError("pseudo_epr expects a diagonal deviation matrix")
    a, b, g, d = np.diag(m).real
    out = np.zeros((4, 4), dtype=complex)
    out[0, 0] = out[3, 3] = (a + g) / 2
    out[1, 1] = out[2, 2] = (b + d) / 2
    out[0, 3] = out[3, 0] = (g - a) / 2
    out[1, 2] = out[2, 1] = (d - b) / 2
    return DeviationMatrix(out)


def solve_populations(c: BellDiagonalCoeffs) -> DiagonalPopulations:
    """Diagonal populations that ``pseudo_epr`` turns into the Bell-diagonal deviation for ``c``."""
    cx, cy, cz = c.as_array()
    return DiagonalPopulations(
        (cz - cx + cy) / 4,
        (-cz - cx - cy) / 4,
        (cz + cx - cy) / 4,
        (-cz + cx + cy) / 4,
    )


def j_evolution(delta: DeviationMatrix, t: float, j: float) -> DeviationMatrix:
    """Conjugate by ``exp(-i 2 pi J t Iz x Iz)``, the on-resonance coupling propagator.

    The propagator is diagonal, so element (k, l) only picks up the phase
    ``exp(-i pi J t (s_k - s_l) / 2)`` with ``s`` the sigma_z x sigma_z signs.
    Main- and anti-diagonal entries have ``s_k == s_l`` and never move.
    """
    if t < 0:
        raise DomainError(f"negative evolution time {t}")
    u = np.exp(-0.5j * np.pi * j * t * ZZ_SIGNS)
    return DeviationMatrix(u[:, None] * delta.matrix * u.conj()[None, :])


# single-quantum coherences of qubit B, which oscillate under the coupling
RESIDUAL_POSITIONS = ((0, 1), (2, 3))


def inject_residual_coherence(delta: DeviationMatrix, amplitude: float) -> DeviationMatrix:
    if amplitude < 0:
        raise DomainError("residual amplitude must be >= 0")
    m = np.array(delta.matrix)
    for i, k in RESIDUAL_POSITIONS:
        m[i, k] += amplitude
        m[k, i] += amplitude
    return DeviationMatrix(m)


def sampling_grid(j: float, m_max: int) -> TimeGrid:
    """Delays ``m / (4 J)`` for ``m = 0..m_max``."""
    if not j > 0:
        raise DomainError("J coupling must be positive")
    if m_max < 0:
        raise DomainError("m_max must be >= 0")
    return TimeGrid(tuple(m / (4.0 * j) for m in range(m_max + 1)))
