"""Simulation config, trajectory CSV, run manifest and SVG plot output."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .channels import ChannelSelection, RelaxationParams
from .correlations import OptimizerSettings
from .dynamics import CorrelationRecord, Trajectory
from .nmr import J_CHLOROFORM, TimeGrid, sampling_grid
from .states import (
    BellDiagonalCoeffs,
    BlochDecomposition,
    DeviationMatrix,
    DomainError,
    deviation_from_json,
)

CSV_COLUMNS = ("t", "I", "C", "Q", "cx", "cy", "cz")


class ConfigError(ValueError):
    """Invalid or unreadable configuration."""


@dataclass
class SimulationConfig:
    """Everything needed to reproduce one ``simulate`` run.

    Exactly one of ``bell_diagonal`` and ``state_file`` gives the initial
    deviation matrix. The grid is either ``m_max`` samples of ``1/(4J)`` or
    an explicit ``times`` list.
    """

    bell_diagonal: Optional[list] = None
    state_file: Optional[str] = None
    relaxation: RelaxationParams = field(default_factory=RelaxationParams)
    channels: str = "both"
    j_coupling: float = J_CHLOROFORM
    m_max: Optional[int] = 250
    times: Optional[list] = None
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    residual_amplitude: float = 0.0
    csv: str = "trajectory.csv"
    manifest: str = "manifest.json"
    svg: Optional[str] = None

    def validate(self) -> "SimulationConfig":
        if (self.bell_diagonal is None) == (self.state_file is None):
            raise ConfigError("give exactly one of 'bell_diagonal' and 'state_file'")
        if self.bell_diagonal is not None:
            if len(self.bell_diagonal) != 3:
                raise ConfigError("'bell_diagonal' needs three coefficients")
            try:
                BellDiagonalCoeffs(*self.bell_diagonal)
            except DomainError as exc:
                raise ConfigError(str(exc)) from exc
        if self.state_file is not None and not os.access(self.state_file, os.R_OK):
            raise ConfigError(f"state file {self.state_file!r} is not readable")
        try:
            ChannelSelection(self.channels)
        except ValueError:
            raise ConfigError(f"channels must be pd, gad or both, not {self.channels!r}") from None
        if not self.j_coupling > 0:
            raise ConfigError("j_coupling must be positive")
        if self.residual_amplitude < 0:
            raise ConfigError("residual_amplitude must be >= 0")
        if (self.m_max is None) == (self.times is None):
            raise ConfigError("give exactly one of 'm_max' and 'times'")
        try:
            self.grid()
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def grid(self) -> TimeGrid:
        if self.times is not None:
            return TimeGrid(tuple(self.times))
        return sampling_grid(self.j_coupling, int(self.m_max))

    def selection(self) -> ChannelSelection:
        return ChannelSelection(self.channels)

    def initial_deviation(self) -> DeviationMatrix:
        from .nmr import inject_residual_coherence
        from .states import bell_diagonal_deviation

        if self.bell_diagonal is not None:
            delta = bell_diagonal_deviation(BellDiagonalCoeffs(*self.bell_diagonal))
        else:
            delta = load_state(self.state_file)
        return inject_residual_coherence(delta, self.residual_amplitude)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationConfig":
        d = dict(d)
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            if "relaxation" in d:
                d["relaxation"] = RelaxationParams(**d["relaxation"])
            if "optimizer" in d:
                d["optimizer"] = OptimizerSettings(**d["optimizer"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if d.get("times") is not None and "m_max" not in d:
            d["m_max"] = None
        return cls(**d)


def load_config(path: str) -> SimulationConfig:
    """Read a config JSON; a run manifest is accepted too (its config echo is used)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    if "config" in doc and "tool_version" in doc:
        doc = doc["config"]
    return SimulationConfig.from_dict(doc)


def load_state(path: str) -> DeviationMatrix:
    try:
        with open(path) as fh:
            doc = json.load(fh)
        return deviation_from_json(doc)
    except (OSError, json.JSONDecodeError, DomainError, ValueError) as exc:
        raise ConfigError(f"malformed state file {path!r}: {exc}") from exc


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v: float) -> str:
    return format(float(v), ".12g")


def _report(v: float) -> float:
    return v if v > 0 else 0.0


def trajectory_to_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in traj.records:
        corr = r.bloch.corr
        w.writerow(
            [_fmt(r.t), _fmt(_report(r.mutual_info)), _fmt(_report(r.classical)),
             _fmt(_report(r.quantum)), _fmt(corr[0, 0]), _fmt(corr[1, 1]), _fmt(corr[2, 2])]
        )
    return buf.getvalue()


def read_trajectory_csv(text: str) -> dict:
    """Parse trajectory CSV text into float columns keyed by header name."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ConfigError("empty trajectory CSV")
    header = [h.strip() for h in rows[0]]
    missing = [c for c in ("t", "I", "C", "Q") if c not in header]
    if missing:
        raise ConfigError(f"trajectory CSV lacks columns {missing}")
    try:
        data = np.array([[float(x) for x in row] for row in rows[1:] if row], dtype=float)
    except ValueError as exc:
        raise ConfigError(f"non-numeric CSV entry: {exc}") from exc
    if data.size == 0:
        data = np.zeros((0, len(header)))
    return {h: data[:, i] for i, h in enumerate(header)}


def columns_to_csv(cols: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = list(cols)
    w.writerow(names)
    for row in zip(*(cols[n] for n in names)):
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def trajectory_from_columns(cols: dict) -> Trajectory:
    """Rebuild a Trajectory (correlation values only) from parsed CSV columns."""
    zero = np.zeros(3)
    recs = []
    for i, t in enumerate(cols["t"]):
        corr = np.diag([cols[k][i] if k in cols else 0.0 for k in ("cx", "cy", "cz")])
        recs.append(
            CorrelationRecord(float(t), float(cols["I"][i]), float(cols["C"][i]),
                              float(cols["Q"][i]), BlochDecomposition(zero, zero, corr))
        )
    return Trajectory(tuple(recs))


# ---------------------------------------------------------------- SVG

_SERIES = (("I", "mutual information", "#1f77b4"), ("C", "classical", "#d62728"),
           ("Q", "quantum", "#2ca02c"))


def trajectory_svg(traj: Trajectory, width: int = 640, height: int = 400) -> str:
    """Line chart of I, C and Q against time."""
    left, right, top, bottom = 70, 20, 20, 50
    t = traj.times
    curves = {k: traj.curve(k) for k, _, _ in _SERIES}
    tmax = float(t.max()) if len(t) and t.max() > 0 else 1.0
    ymax = max(float(np.max(v)) for v in curves.values()) if len(t) else 1.0
    ymax = ymax if ymax > 0 else 1.0
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + pw * x / tmax

    def sy(y):
        return top + ph * (1 - y / ymax)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for i in range(5):
        xv, yv = tmax * i / 4, ymax * i / 4
        out.append(f'<text x="{sx(xv):.1f}" y="{top + ph + 16}" text-anchor="middle">{xv:.3g}</text>')
        out.append(f'<text x="{left - 6}" y="{sy(yv) + 4:.1f}" text-anchor="end">{yv:.3g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">t (s)</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2})">correlation (eps^2/ln2 bit)</text>'
    )
    for n, (key, label, color) in enumerate(_SERIES):
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(t, curves[key]))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 14 + 16 * n
        out.append(f'<line x1="{left + pw - 150}" y1="{ly}" x2="{left + pw - 130}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw - 125}" y="{ly + 4}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
