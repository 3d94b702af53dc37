"""Kraus channels for NMR relaxation: generalized amplitude damping and phase damping.

Each channel is built fresh for an elapsed time ``t`` measured from the start
of the relaxation delay, using the closed-form decay parameters
``p = 1 - exp(-t/T1)`` and ``lambda = 1 - exp(-t/T2)``.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .states import DensityMatrix, DomainError

COMPLETENESS_ATOL = 1e-12


class ChannelValidityError(ValueError):
    """Kraus set fails the completeness relation."""


class ChannelSelection(enum.Enum):
    PHASE_DAMPING = "pd"
    AMPLITUDE_DAMPING = "gad"
    BOTH = "both"

    @property
    def uses_gad(self) -> bool:
        return self is not ChannelSelection.PHASE_DAMPING

    @property
    def uses_pd(self) -> bool:
        return self is not ChannelSelection.AMPLITUDE_DAMPING


@dataclass(frozen=True)
class RelaxationParams:
    """Per-qubit relaxation constants (seconds) and the polarization ``epsilon``.

    ``t2_a``/``t2_b`` are the effective T2* values, since the relaxation delay
    has no refocusing pulses.
    """

    t1_a: float = 2.5
    t1_b: float = 7.0
    t2_a: float = 0.31
    t2_b: float = 0.12
    epsilon: float = 1e-5

    def __post_init__(self):
        for name in ("t1_a", "t1_b", "t2_a", "t2_b"):
            v = getattr(self, name)
            if not (v > 0 and np.isfinite(v) or v == np.inf):
                raise DomainError(f"{name} must be positive, got {v}")
        if not (0.0 < self.epsilon <= 0.1):
            raise DomainError(f"epsilon={self.epsilon} outside (0, 0.1]")
        for q in ("a", "b"):
            t1, t2 = getattr(self, f"t1_{q}"), getattr(self, f"t2_{q}")
            if t2 > 2.0 * t1:
                warnings.warn(f"T2 > 2*T1 on qubit {q.upper()} ({t2} > 2*{t1})", stacklevel=2)


@dataclass(frozen=True)
class QuantumChannel:
    """Operator-sum channel ``rho -> sum_k E_k rho E_k^dagger``."""

    kraus_ops: tuple
    label: str = ""

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise ChannelValidityError("channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        if dim not in (2, 4) or any(k.shape != (dim, dim) for k in ops):
            raise DomainError("Kraus operators must all be 2x2 or all be 4x4")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    def completeness_error(self) -> float:
        s = sum(k.conj().T @ k for k in self.kraus_ops)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def check(self, atol: float = COMPLETENESS_ATOL) -> "QuantumChannel":
        err = self.completeness_error()
        if err > atol:
            raise ChannelValidityError(f"{self.label or 'channel'}: completeness error {err:.3g}")
        return self

    def act(self, m: np.ndarray) -> np.ndarray:
        """Apply to a bare matrix (no state validation)."""
        m = np.asarray(m, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise DomainError(f"{self.dim}x{self.dim} channel applied to {m.shape} matrix")
        return sum(k @ m @ k.conj().T for k in self.kraus_ops)


def identity_channel(dim: int = 2) -> QuantumChannel:
    return QuantumChannel((np.eye(dim),), label="id")


def _check_time(t: float, tc: float, name: str) -> None:
    if t < 0:
        raise DomainError(f"negative elapsed time {t}")
    if not tc > 0:
        raise DomainError(f"{name} must be positive, got {tc}")


def gad_channel(t: float, t1: float, epsilon: float) -> QuantumChannel:
    """Generalized amplitude damping after time ``t``.

    The thermal population is ``gamma = 1/2 - epsilon/2``, so the qubit relaxes
    to ``diag(gamma, 1 - gamma)``.
    """
    _check_time(t, t1, "t1")
    p = -np.expm1(-t / t1)
    g = 0.5 - epsilon / 2.0
    e0 = np.sqrt(g) * np.array([[1, 0], [0, np.sqrt(1 - p)]])
    e1 = np.sqrt(g) * np.array([[0, np.sqrt(p)], [0, 0]])
    e2 = np.sqrt(1 - g) * np.array([[np.sqrt(1 - p), 0], [0, 1]])
    e3 = np.sqrt(1 - g) * np.array([[0, 0], [np.sqrt(p), 0]])
    return QuantumChannel((e0, e1, e2, e3), label=f"gad(t={t:g},T1={t1:g})")


def pd_channel(t: float, t2: float) -> QuantumChannel:
    """Phase damping after time ``t``; coherences shrink by ``exp(-t/t2)``."""
    _check_time(t, t2, "t2")
    lam = -np.expm1(-t / t2)
    e0 = np.sqrt(1 - lam / 2) * np.eye(2)
    e1 = np.sqrt(lam / 2) * np.diag([1.0, -1.0])
    return QuantumChannel((e0, e1), label=f"pd(t={t:g},T2={t2:g})")


def compose(first: QuantumChannel, second: QuantumChannel) -> QuantumChannel:
    """Channel that applies ``first`` and then ``second``."""
    if first.dim != second.dim:
        raise DomainError(f"cannot compose {first.dim}-dim and {second.dim}-dim channels")
    ops = tuple(f @ e for e in first.kraus_ops for f in second.kraus_ops)
    return QuantumChannel(ops, label=f"{second.label}*{first.label}")


def lift_local(ch_a: QuantumChannel, ch_b: QuantumChannel) -> QuantumChannel:
    """Independent action of ``ch_a`` on qubit A and ``ch_b`` on qubit B."""
    for ch in (ch_a, ch_b):
        if ch.dim != 2:
            raise DomainError("lift_local takes single-qubit channels")
        ch.check()
    ops = tuple(np.kron(e, f) for e in ch_a.kraus_ops for f in ch_b.kraus_ops)
    return QuantumChannel(ops, label=f"({ch_a.label})x({ch_b.label})")


def apply(ch: QuantumChannel, rho: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(ch.act(rho.matrix), epsilon=rho.epsilon)


def local_noise(t: float, params: RelaxationParams, sel: ChannelSelection) -> QuantumChannel:
    """Two-qubit channel for elapsed time ``t``: per qubit, GAD then PD as selected."""
    per_qubit = []
    for q in ("a", "b"):
        ch = identity_channel(2)
        if sel.uses_gad:
            ch = compose(ch, gad_channel(t, getattr(params, f"t1_{q}"), params.epsilon))
        if sel.uses_pd:
            ch = compose(ch, pd_channel(t, getattr(params, f"t2_{q}")))
        per_qubit.append(ch)
    return lift_local(*per_qubit)


def channel_from_ops(ops: Sequence[np.ndarray], label: str = "") -> QuantumChannel:
    return QuantumChannel(tuple(ops), label=label).check()
