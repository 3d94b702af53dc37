"""Built-in consistency checks run by ``nmrdiscord validate``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channels import QuantumChannel, compose, gad_channel, pd_channel
from .correlations import (
    OptimizerSettings,
    bell_diagonal_closed_form,
    classical_correlation,
    mutual_info_exact,
    mutual_info_expansion,
)
from .nmr import diagonal_deviation, pseudo_epr, solve_populations
from .states import BellDiagonalCoeffs, bell_diagonal_deviation, bloch_decompose, compose_density


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _perturb(ch: QuantumChannel) -> QuantumChannel:
    ops = list(ch.kraus_ops)
    ops[0] = ops[0] * (1 + 1e-6)
    return QuantumChannel(tuple(ops), label=ch.label + "+fault")


def check_completeness(rng, n: int, fault: bool = False) -> CheckResult:
    worst = 0.0
    for _ in range(n):
        t = rng.uniform(0, 5)
        t1, t2 = rng.uniform(0.05, 10), rng.uniform(0.01, 2)
        eps = rng.uniform(1e-6, 0.1)
        for ch in (gad_channel(t, t1, eps), pd_channel(t, t2)):
            if fault:
                ch = _perturb(ch)
            worst = max(worst, ch.completeness_error())
    return CheckResult("kraus completeness", worst <= 1e-12, f"max error {worst:.2e} (<= 1e-12)")


def check_commutation(rng, n: int) -> CheckResult:
    worst = 0.0
    for _ in range(n):
        t, t1, t2, eps = rng.uniform(0, 2), rng.uniform(0.1, 5), rng.uniform(0.05, 1), 1e-3
        g, p = gad_channel(t, t1, eps), pd_channel(t, t2)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        diff = compose(g, p).act(rho) - compose(p, g).act(rho)
        worst = max(worst, float(np.max(np.abs(diff))))
    return CheckResult("gad/pd commutation", worst <= 1e-12, f"max diff {worst:.2e} (<= 1e-12)")


def check_oracle(rng, n: int) -> CheckResult:
    worst = 0.0
    settings = OptimizerSettings()
    for _ in range(n):
        c = BellDiagonalCoeffs(*rng.uniform(-1, 1, size=3))
        got = classical_correlation(bell_diagonal_deviation(c), settings).value
        worst = max(worst, abs(got - bell_diagonal_closed_form(c).classical))
    return CheckResult("optimizer vs closed form", worst <= 1e-6, f"max diff {worst:.2e} (<= 1e-6)")


def check_expansion() -> CheckResult:
    delta = bell_diagonal_deviation(BellDiagonalCoeffs(1, 1, 1))
    errs = []
    for eps in (1e-3, 1e-4, 1e-5):
        approx = eps**2 / math.log(2) * mutual_info_expansion(delta)
        exact = mutual_info_exact(compose_density(delta, eps))
        errs.append(abs(approx - exact) / exact)
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    ok = all(5 <= r <= 20 for r in ratios)
    return CheckResult("expansion vs exact", ok, "error ratios " + ", ".join(f"{r:.2f}" for r in ratios))


def check_preparation(rng, n: int) -> CheckResult:
    worst = 0.0
    for _ in range(n):
        c = rng.uniform(-1, 1, size=3)
        delta = pseudo_epr(diagonal_deviation(solve_populations(BellDiagonalCoeffs(*c))))
        worst = max(worst, float(np.max(np.abs(bloch_decompose(delta).corr - np.diag(c)))))
    return CheckResult("preparation round trip", worst <= 1e-12, f"max diff {worst:.2e} (<= 1e-12)")


def run_checks(quick: bool = False, fault: bool = False, seed: int = 2011) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    n = 10 if quick else 100
    checks: list[Callable[[], CheckResult]] = [
        lambda: check_completeness(rng, n, fault),
        lambda: check_commutation(rng, n),
        lambda: check_oracle(rng, n),
        check_expansion,
        lambda: check_preparation(rng, n),
    ]
    return [c() for c in checks]
