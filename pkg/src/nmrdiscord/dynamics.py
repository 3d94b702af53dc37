"""Correlation trajectories under local relaxation and sudden-change detection."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channels import ChannelSelection, RelaxationParams, apply, local_noise
from .correlations import OptimizerSettings, quantum_discord
from .nmr import TimeGrid, j_evolution
from .states import (
    BellDiagonalCoeffs,
    BlochDecomposition,
    DeviationMatrix,
    StateValidityError,
    bloch_decompose,
    compose_density,
    extract_deviation,
)

MIN_DETECT_POINTS = 8
NO_CHANGE_IMPROVEMENT = 0.05


class TrajectoryError(RuntimeError):
    def __init__(self, t: float, cause: Exception):
        super().__init__(f"invalid state at t={t:.9g} s: {cause}")
        self.t = t


class NoCrossingError(ValueError):
    """The dominant correlation axis never changes."""


@dataclass(frozen=True)
class CorrelationRecord:
    t: float
    mutual_info: float
    classical: float
    quantum: float
    bloch: BlochDecomposition
    converged: bool = True


@dataclass(frozen=True)
class Trajectory:
    records: tuple

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def curve(self, name: str) -> np.ndarray:
        attr = {"I": "mutual_info", "C": "classical", "Q": "quantum"}.get(name, name)
        return np.array([getattr(r, attr) for r in self.records])

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class SuddenChangeReport:
    detected: bool
    t_star: Optional[float]
    slope_before: Optional[float]
    slope_after: Optional[float]
    method: str
    residual: float
    single_residual: float
    curve: str = "classical"

    def to_dict(self) -> dict:
        return {
            "detected": self.detected,
            "t_star": self.t_star,
            "slope_before": self.slope_before,
            "slope_after": self.slope_after,
            "method": self.method,
            "residual": self.residual,
            "single_segment_residual": self.single_residual,
            "curve": self.curve,
        }


def evolve_state(
    delta0: DeviationMatrix,
    t: float,
    params: RelaxationParams,
    sel: ChannelSelection,
    j_coupling: Optional[float] = None,
) -> DeviationMatrix:
    """Deviation matrix at delay ``t``: J-coupling propagation, then local relaxation."""
    delta = j_evolution(delta0, t, j_coupling) if j_coupling else delta0
    rho = apply(local_noise(t, params, sel), compose_density(delta, params.epsilon))
    return extract_deviation(rho)


def evolve_trajectory(
    delta0: DeviationMatrix,
    params: RelaxationParams,
    grid: TimeGrid,
    sel: ChannelSelection,
    settings: OptimizerSettings = OptimizerSettings(),
    j_coupling: Optional[float] = None,
) -> Trajectory:
    """Correlations at every grid time, each from a fresh channel applied to the initial state.

    With ``j_coupling`` set, the scalar coupling propagator acts before the
    relaxation channel; it only matters for states with coherences off the X
    positions.
    """
    records = []
    for t in grid:
        try:
            delta = evolve_state(delta0, t, params, sel, j_coupling)
        except StateValidityError as exc:
            raise TrajectoryError(t, exc) from exc
        vals = quantum_discord(delta, settings)
        records.append(
            CorrelationRecord(
                t, vals.mutual_info, vals.classical, vals.quantum, bloch_decompose(delta),
                vals.converged,
            )
        )
    return Trajectory(tuple(records))


def analytic_sudden_change(c: BellDiagonalCoeffs, t2_a: float, t2_b: float) -> float:
    """Crossing time of the decaying transverse correlation with ``|c_z|`` under phase damping.

    Transverse components shrink as ``exp(-t (1/t2_a + 1/t2_b))`` while ``c_z``
    is untouched, so the maximizing axis switches at
    ``ln(max(|c_x|, |c_y|) / |c_z|) / (1/t2_a + 1/t2_b)``. Returns 0.0 when the
    z axis already dominates at t = 0.
    """
    if c.c_z == 0:
        raise NoCrossingError("c_z = 0: transverse correlations dominate for all t")
    lead = max(abs(c.c_x), abs(c.c_y))
    if lead <= abs(c.c_z):
        return 0.0
    return math.log(lead / abs(c.c_z)) / (1.0 / t2_a + 1.0 / t2_b)


def _line_fit(t: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares ``(slope, intercept, sse)``."""
    tm, ym = t.mean(), y.mean()
    tc = t - tm
    yc = y - ym
    denom = float(tc @ tc)
    slope = float(tc @ yc) / denom if denom > 0 else 0.0
    r = yc - slope * tc
    return slope, float(ym - slope * tm), float(r @ r)


def two_segment_fit(t: Sequence[float], y: Sequence[float]) -> tuple[int, float, tuple, tuple]:
    """Best split of the samples into two independently fitted lines.

    The first line covers samples ``0..k`` and the second ``k+1..n-1``; each
    keeps at least two samples. Returns ``(k, sse, line1, line2)`` with lines as
    ``(slope, intercept)``. Ties go to the earliest ``k``.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    best = None
    for k in range(1, len(t) - 2):
        s1, c1, e1 = _line_fit(t[: k + 1], y[: k + 1])
        s2, c2, e2 = _line_fit(t[k + 1 :], y[k + 1 :])
        if best is None or e1 + e2 < best[1]:
            best = (k, e1 + e2, (s1, c1), (s2, c2))
    return best


def _crossing(t: np.ndarray, k: int, line1: tuple, line2: tuple) -> float:
    """Intersection of the two lines, kept inside ``[t_k, t_k+1]``."""
    lo, hi = float(t[k]), float(t[k + 1])
    ds = line1[0] - line2[0]
    if ds == 0:
        return 0.5 * (lo + hi)
    x = (line2[1] - line1[1]) / ds
    return min(max(x, lo), hi)


def detect_sudden_change(
    traj: Trajectory, curve: str = "classical", noise_floor: float = 1e-9, scale: str = "auto"
) -> SuddenChangeReport:
    """Locate an abrupt change of decay rate on one correlation curve."""
    if len(traj) < MIN_DETECT_POINTS:
        raise ValueError(f"need at least {MIN_DETECT_POINTS} records, got {len(traj)}")
    return detect_in_series(traj.times, traj.curve(curve), curve, noise_floor, scale)


def detect_in_series(
    t, y, curve: str = "classical", noise_floor: float = 1e-9, scale: str = "auto"
) -> SuddenChangeReport:
    """Two-segment linear fit with the split scanned over all interior samples.

    ``scale`` picks the fit coordinates: ``"linear"`` fits raw values, ``"log"``
    fits ``log(y)`` so exponential decays become straight lines, and ``"auto"``
    tries both when all values are positive and keeps the one with the smaller
    unexplained variance fraction. ``t_star`` is where the two fitted lines
    meet, bounded by the samples either side of the split. Reported slopes are
    those of raw-value lines on the two segments, per second.

    No change is reported when the split improves on a single line by less
    than 5% of its residual, or when a single line already fits within
    ``noise_floor`` rms (relative rms on the log scale).
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(t) < MIN_DETECT_POINTS:
        raise ValueError(f"need at least {MIN_DETECT_POINTS} samples, got {len(t)}")
    if scale not in ("auto", "linear", "log"):
        raise ValueError(f"unknown scale {scale!r}")
    positive = bool(np.all(y > 0))
    if scale == "log" and not positive:
        raise ValueError("log scale needs strictly positive values")

    candidates = []
    if scale in ("auto", "linear"):
        candidates.append(("linear", y))
    if scale == "log" or (scale == "auto" and positive):
        candidates.append(("log", np.log(y)))
    best = None
    for name, v in candidates:
        _, _, single = _line_fit(t, v)
        k, sse, line1, line2 = two_segment_fit(t, v)
        total = float(np.sum((v - v.mean()) ** 2))
        frac = sse / total if total > 0 else 0.0
        if best is None or frac < best[0]:
            best = (frac, name, k, sse, single, line1, line2)
    _, name, k, sse, single, line1, line2 = best
    method = f"two-segment-fit/{name}"
    flat = math.sqrt(single / len(t)) <= noise_floor
    if flat or (single - sse) < NO_CHANGE_IMPROVEMENT * single:
        return SuddenChangeReport(False, None, None, None, method, sse, single, curve)
    s1 = _line_fit(t[: k + 1], y[: k + 1])[0]
    s2 = _line_fit(t[k + 1 :], y[k + 1 :])[0]
    return SuddenChangeReport(
        True, _crossing(t, k, line1, line2), s1, s2, method, sse, single, curve
    )


def analytic_report(c: BellDiagonalCoeffs, t2_a: float, t2_b: float) -> SuddenChangeReport:
    """Sudden-change report from the closed-form phase-damping crossing, with exact slopes at ``t*``."""
    t_star = analytic_sudden_change(c, t2_a, t2_b)
    rate = 1.0 / t2_a + 1.0 / t2_b
    lead = max(abs(c.c_x), abs(c.c_y))
    before = -rate * lead**2 * math.exp(-2 * rate * t_star)
    return SuddenChangeReport(True, t_star, before, 0.0, "analytic", 0.0, 0.0, "classical")


def subtract_amplitude_damping(
    delta0: DeviationMatrix,
    params: RelaxationParams,
    grid: TimeGrid,
    settings: OptimizerSettings = OptimizerSettings(),
    j_coupling: Optional[float] = None,
) -> tuple[Trajectory, Trajectory]:
    """Trajectories with both relaxation channels and with phase damping alone.

    Their difference is the contribution of the thermal (amplitude-damping)
    channel.
    """
    both = evolve_trajectory(delta0, params, grid, ChannelSelection.BOTH, settings, j_coupling)
    pd_only = evolve_trajectory(
        delta0, params, grid, ChannelSelection.PHASE_DAMPING, settings, j_coupling
    )
    return both, pd_only


def oscillation_autocorrelation(values: Sequence[float], max_lag: int = 8) -> np.ndarray:
    """Normalized autocorrelation of the second differences of ``values``.

    Second differencing strips smooth decay so that sampling-rate oscillations
    dominate; lag 0 is 1 by construction.
    """
    d = np.diff(np.asarray(values, dtype=float), 2)
    d = d - d.mean()
    den = float(d @ d)
    if den == 0:
        return np.zeros(max_lag + 1)
    return np.array([float(d[: len(d) - lag] @ d[lag:]) / den for lag in range(max_lag + 1)])


def has_period_peak(
    values: Sequence[float], lag: int = 4, min_height: float = 0.5, min_prominence: float = 0.3
) -> bool:
    """True when the autocorrelation has a clear local maximum at ``lag`` samples."""
    acf = oscillation_autocorrelation(values, lag + 1)
    neighbours = max(acf[lag - 1], acf[lag + 1])
    return bool(acf[lag] >= min_height and acf[lag] - neighbours >= min_prominence)
