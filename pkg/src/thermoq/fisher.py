"""Classical and quantum Fisher information for temperature estimation.

The quantum value is computed through the symmetric logarithmic derivative
on the support of the state; rank-deficient states are the norm here (pure
preparations, zero-temperature fixed points), so leakage of the state
derivative outside the retained support is a hard error rather than a
silent truncation.
"""

from dataclasses import dataclass

import numpy as np

from .lindblad import evolve_with_sensitivity
from .operators import hermitian

SUPPORT_CUT = 1e-12
LEAK_TOL = 1e-8
_P_FLOOR = 1e-14
_DP_FLOOR = 1e-12


@dataclass(frozen=True)
class OutcomeDistribution:
    """Outcome probabilities and their temperature derivatives."""

    p: np.ndarray
    dp_dT: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        dp = np.asarray(self.dp_dT, dtype=float)
        if p.shape != dp.shape:
            raise ValueError("p and dp_dT must have matching shapes")
        if np.any(p < -1e-12):
            raise ValueError(f"negative probability {p.min():.3e}")
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {p.sum()}, not 1")
        if abs(dp.sum()) > 1e-10:
            raise ValueError(f"derivatives sum to {dp.sum()}, not 0")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "dp_dT", dp)

    def fisher(self):
        return classical_fisher(self.p, self.dp_dT)


def classical_fisher(p, dp_dT):
    """Classical Fisher information sum_x (dp_x)^2 / p_x.

    Outcomes with p below 1e-14 contribute zero provided their derivative
    is below 1e-12 in magnitude (a removable 0/0, e.g. outcomes never
    visited at leading order); otherwise the information is ill defined
    and an error is raised.
    """
    p = np.asarray(p, dtype=float)
    dp = np.asarray(dp_dT, dtype=float)
    out = 0.0
    for pi, di in zip(p.ravel(), dp.ravel()):
        if pi < _P_FLOOR:
            if abs(di) < _DP_FLOOR:
                continue
            raise ValueError(
                f"ill-defined Fisher information: p={pi:.3e} with dp={di:.3e}"
            )
        out += di * di / pi
    return out


def qfi_and_sld(rho, drho):
    """Quantum Fisher information and the SLD of (rho, d rho/dT).

    Eigendecomposes rho and keeps the pairs (i, j) with lambda_i + lambda_j
    above the support cutoff 1e-12:

        F = sum 2 |<i|drho|j>|^2 / (lambda_i + lambda_j),
        L = sum 2 <i|drho|j> / (lambda_i + lambda_j) |i><j|.

    If drho carries more than 1e-8 (Frobenius) weight on the excluded
    null-space block the QFI is undefined and an error is raised.
    """
    rho = hermitian(rho)
    drho = hermitian(drho)
    if abs(np.trace(drho).real) > 1e-10 * max(1.0, np.linalg.norm(drho)):
        raise ValueError("state derivative must be traceless")
    evals, evecs = np.linalg.eigh(rho)
    evals = np.clip(evals, 0.0, None)  # eigh roundoff can produce -1e-17
    d = drho.shape[0]
    drho_eig = evecs.conj().T @ drho @ evecs
    lam_sum = evals[:, None] + evals[None, :]
    keep = lam_sum > SUPPORT_CUT
    dropped = np.where(keep, 0.0, drho_eig)
    if np.linalg.norm(dropped) > LEAK_TOL:
        raise ValueError(
            "state derivative has weight "
            f"{np.linalg.norm(dropped):.3e} outside the state support; "
            "QFI is undefined"
        )
    ratio = np.zeros((d, d), dtype=complex)
    ratio[keep] = drho_eig[keep] / lam_sum[keep]
    fi = float(2.0 * np.sum(np.abs(drho_eig[keep]) ** 2 / lam_sum[keep]))
    sld = evecs @ (2.0 * ratio) @ evecs.conj().T
    return fi, sld


def qfi(rho, drho):
    """Quantum Fisher information of (rho, d rho/dT)."""
    return qfi_and_sld(rho, drho)[0]


def measurement_fisher(rho, drho, povm):
    """Classical Fisher information of measuring ``povm`` on (rho, drho)."""
    p = np.array([np.trace(E @ rho).real for E in povm])
    dp = np.array([np.trace(E @ drho).real for E in povm])
    return classical_fisher(p, dp)


def qfi_rate_vs_time(model, rho0, t_grid, drho0_dT=None):
    """QFI of the evolved state divided by elapsed time, on a grid of times."""
    rates = []
    for t in t_grid:
        if t <= 0:
            raise ValueError(f"grid times must be positive, got {t}")
        rho_t, sigma_t = evolve_with_sensitivity(model, rho0, t, drho0_dT)
        rates.append(qfi(rho_t, sigma_t) / t)
    return np.array(rates)
