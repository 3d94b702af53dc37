"""Mutual information, classical correlation and symmetric discord to leading order in eps.

All correlation values are returned in units of ``eps**2 / ln 2`` bit. The
classical part maximizes the measurement-induced mutual information over pairs
of local rank-1 projective measurements, parameterized by Bloch directions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .states import (
    EIGEN_FLOOR,
    I2,
    PAULIS,
    BellDiagonalCoeffs,
    DensityMatrix,
    DeviationMatrix,
    StateValidityError,
    bloch_decompose,
    partial_trace,
)

UNIT_ATOL = 1e-12


def _unit(theta: float, phi: float) -> np.ndarray:
    return np.array(
        [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
    )


def _angles(n: np.ndarray) -> tuple[float, float]:
    # antipodal directions define the same projector pair; keep the upper hemisphere
    if n[2] < 0 or (n[2] == 0 and (n[1] < 0 or (n[1] == 0 and n[0] < 0))):
        n = -n
    theta = math.acos(min(1.0, max(-1.0, n[2])))
    phi = math.atan2(n[1], n[0]) % (2 * math.pi)
    return theta, phi


@dataclass(frozen=True)
class ProductProjectiveBasis:
    """Local projective measurements ``(I +/- n.sigma)/2`` on each qubit."""

    n_a: np.ndarray
    n_b: np.ndarray

    def __post_init__(self):
        for name in ("n_a", "n_b"):
            n = np.asarray(getattr(self, name), dtype=float)
            if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > UNIT_ATOL:
                raise ValueError(f"{name} must be a unit 3-vector, got {n}")
            object.__setattr__(self, name, n)

    @classmethod
    def from_angles(cls, theta_a, phi_a, theta_b, phi_b) -> "ProductProjectiveBasis":
        return cls(_unit(theta_a, phi_a), _unit(theta_b, phi_b))

    @classmethod
    def axes(cls, axis_a: str, axis_b: str) -> "ProductProjectiveBasis":
        e = {"x": (1.0, 0, 0), "y": (0, 1.0, 0), "z": (0, 0, 1.0)}
        return cls(np.array(e[axis_a]), np.array(e[axis_b]))

    def angles(self) -> dict:
        ta, pa = _angles(self.n_a)
        tb, pb = _angles(self.n_b)
        return {"theta_a": ta, "phi_a": pa, "theta_b": tb, "phi_b": pb}

    def projectors(self, which: str) -> tuple[np.ndarray, np.ndarray]:
        n = self.n_a if which == "A" else self.n_b
        ns = sum(ni * s for ni, s in zip(n, PAULIS))
        return (I2 + ns) / 2.0, (I2 - ns) / 2.0


@dataclass(frozen=True)
class OptimizerSettings:
    grid_theta: int = 24
    grid_phi: int = 48
    refine_iters: int = 2000
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.grid_theta < 2 or self.grid_phi < 2 or self.refine_iters < 1:
            raise ValueError("grid counts must be >= 2 and refine_iters >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class MeasurementOptimum:
    value: float
    basis: ProductProjectiveBasis
    converged: bool = True


@dataclass(frozen=True)
class CorrelationValues:
    """``I = C + Q`` in units of ``eps**2/ln2`` bit."""

    mutual_info: float
    classical: float
    quantum: float
    maximizer: Optional[ProductProjectiveBasis] = None
    converged: bool = True

    def clamped(self) -> "CorrelationValues":
        """Copy with negative rounding residue set to zero, for reporting only."""
        return CorrelationValues(
            max(self.mutual_info, 0.0),
            max(self.classical, 0.0),
            max(self.quantum, 0.0),
            self.maximizer,
            self.converged,
        )


def mutual_info_expansion(delta: DeviationMatrix) -> float:
    """``2 tr(d^2) - tr(d_A^2) - tr(d_B^2)``, the leading-order mutual information."""
    m = delta.matrix
    da = partial_trace(m, "A")
    db = partial_trace(m, "B")
    return float(
        (2 * np.trace(m @ m) - np.trace(da @ da) - np.trace(db @ db)).real
    )


def measure_map(delta: DeviationMatrix, basis: ProductProjectiveBasis) -> DeviationMatrix:
    m = delta.matrix
    out = np.zeros((4, 4), dtype=complex)
    for pa in basis.projectors("A"):
        for pb in basis.projectors("B"):
            p = np.kron(pa, pb)
            out += p @ m @ p
    return DeviationMatrix(out)


def measured_mutual_info(delta: DeviationMatrix, basis: ProductProjectiveBasis) -> float:
    return mutual_info_expansion(measure_map(delta, basis))


# The measured state has Bloch data a' = (a.n_a) n_a, b' = (b.n_b) n_b and
# T' = (n_a.T.n_b) n_a n_b^T; inserted into the expansion the local terms cancel,
# leaving (n_a.T.n_b)^2 / 2. The optimizer works on this form.
def _measured_info_bloch(corr: np.ndarray, n_a: np.ndarray, n_b: np.ndarray) -> float:
    return 0.5 * float(n_a @ corr @ n_b) ** 2


def _sphere_grid(settings: OptimizerSettings) -> np.ndarray:
    """(theta, phi) pairs over the upper hemisphere in lexicographic order; the pole once."""
    thetas = np.linspace(0.0, np.pi / 2, settings.grid_theta)
    phis = 2 * np.pi * np.arange(settings.grid_phi) / settings.grid_phi
    pts = [(0.0, 0.0)] + [(t, p) for t in thetas[1:] for p in phis]
    return np.array(pts)


def _unit_rows(angles: np.ndarray) -> np.ndarray:
    th, ph = angles[:, 0], angles[:, 1]
    n = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1)
    n[0] = (0.0, 0.0, 1.0)
    return n


@lru_cache(maxsize=8)
def _grid_directions(settings: OptimizerSettings) -> tuple[np.ndarray, np.ndarray]:
    grid = _sphere_grid(settings)
    return grid, _unit_rows(grid)


def _grid_search(corr: np.ndarray, settings: OptimizerSettings) -> tuple[float, np.ndarray]:
    grid, n = _grid_directions(settings)
    vals = n @ corr @ n.T
    np.square(vals, out=vals)
    best = float(vals.max())
    # first index in (theta_a, phi_a, theta_b, phi_b) order among the tied maxima
    flat = int(np.argmax(vals.ravel() >= best - 1e-12 * max(best, 1e-300)))
    ia, ib = divmod(flat, len(grid))
    return 0.5 * best, np.concatenate([grid[ia], grid[ib]])


def classical_correlation(
    delta: DeviationMatrix, settings: OptimizerSettings = OptimizerSettings()
) -> MeasurementOptimum:
    """Maximize the measured mutual information over product projective bases.

    A hemisphere grid scan (joint over both qubits) picks a start cell, and a
    Nelder-Mead simplex refines it. The refined point replaces the grid point
    only when it is strictly better. ``converged`` is False when the simplex
    hit ``refine_iters`` first; the best value found is still returned.
    """
    corr = bloch_decompose(delta).corr
    best, x0 = _grid_search(corr, settings)

    def neg(x):
        return -_measured_info_bloch(corr, _unit(x[0], x[1]), _unit(x[2], x[3]))

    dth = (np.pi / 2) / (settings.grid_theta - 1)
    dph = 2 * np.pi / settings.grid_phi
    simplex = np.vstack([x0] + [x0 + step for step in np.diag([dth, dph, dth, dph]) / 2])
    res = minimize(
        neg,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "maxiter": settings.refine_iters,
            "xatol": 1e-7,
            "fatol": settings.tolerance * 1e-3,
        },
    )
    x = x0
    if -res.fun > best:
        best, x = float(-res.fun), res.x
    basis = ProductProjectiveBasis(_unit(x[0], x[1]), _unit(x[2], x[3]))
    return MeasurementOptimum(best, basis, bool(res.success))


def quantum_discord(
    delta: DeviationMatrix, settings: OptimizerSettings = OptimizerSettings()
) -> CorrelationValues:
    total = mutual_info_expansion(delta)
    opt = classical_correlation(delta, settings)
    return CorrelationValues(total, opt.value, total - opt.value, opt.basis, opt.converged)


def bell_diagonal_closed_form(c: BellDiagonalCoeffs) -> CorrelationValues:
    sq = c.as_array() ** 2
    total = float(sq.sum() / 2)
    classical = float(sq.max() / 2)
    return CorrelationValues(total, classical, total - classical)


def von_neumann_entropy(m: np.ndarray) -> float:
    """Entropy in bits, evaluated as ``log2 d - sum (1/d + x) log1p(d x) / ln 2``.

    ``x`` are the eigenvalue offsets from ``1/d``; the form keeps full relative
    precision for nearly maximally mixed states.
    """
    d = m.shape[0]
    x = np.linalg.eigvalsh(np.asarray(m) - np.eye(d) / d)
    lam = 1.0 / d + x
    if lam.min() < EIGEN_FLOOR:
        raise StateValidityError(f"negative eigenvalue {lam.min():.3g}")
    live = lam > 0
    terms = lam[live] * np.log1p(d * x[live])
    return float(math.log2(d) - terms.sum() / math.log(2))


def mutual_info_exact(rho: DensityMatrix) -> float:
    """``S(A) + S(B) - S(AB)`` in bits."""
    m = rho.matrix
    return (
        von_neumann_entropy(partial_trace(m, "A"))
        + von_neumann_entropy(partial_trace(m, "B"))
        - von_neumann_entropy(m)
    )
