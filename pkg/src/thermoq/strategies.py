"""Explicit estimation protocols and their Fisher-information rates.

Two families: the continuous measure-and-prepare scheme, whose leading-order
rate saturates the fixed-Hamiltonian bound, and the three low-temperature
coherent strategies on a decaying two-level probe (plain interferometry, an
entangled ancilla with a parity readout, and continuously monitored parity
with immediate reset). The coherent strategies work in reduced units where
the decay rate and the shift derivative are both 1, so the figure of merit
r is the Fisher rate in units of s_dot^2 / gamma.
"""

import math
from dataclasses import dataclass

import numpy as np

from .fisher import qfi
from .util import golden_section_min

_LEAK_TOL = 1e-10

# optimization box shared by all three strategies (units of 1/gamma)
_T_LO, _T_HI = 0.05, 10.0
_GRID_N = 64
_GOLDEN_TOL = 1e-10


@dataclass(frozen=True)
class StrategyResult:
    """Optimized protocol performance and the oracle value it was checked
    against (Fisher rate recomputed from the explicitly constructed state)."""

    kind: str
    fi_rate: float
    r_coefficient: float
    a_opt: float
    t_opt: float
    oracle_rate: float


def map_fisher_rate(model, psi, eps):
    """Leading-order Fisher rate of the jump measurement from state psi.

    The probe is prepared in psi inside the subspace labeled eps, evolves
    for an infinitesimal step, and the occupied subspace is measured; the
    information per unit time is

        sum_w (dgamma_w^2 / gamma_w) <psi| A_w^dag A_w |psi>,

    which for the top eigenvector of the attaining block equals the
    fixed-H bound exactly. psi leaking outside its subspace beyond 1e-10 is
    an error.
    """
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    P = model.projector(eps)
    if np.linalg.norm(psi - P @ psi) > _LEAK_TOL:
        raise ValueError(f"state leaks outside the subspace labeled {eps}")
    rate = 0.0
    for ch in model.channels:
        Apsi = ch.A @ psi
        weight = float(np.vdot(Apsi, Apsi).real)
        if weight <= 1e-30:
            continue
        if ch.gamma == 0.0:
            if ch.dgamma_dT == 0.0:
                continue
            return math.inf
        rate += ch.dgamma_dT ** 2 / ch.gamma * weight
    return rate


def qubit_closed_form_state(a, t, w_tilde=1.0, gamma=1.0, s_dot=1.0,
                            ancilla=False):
    """Exact state of the decaying two-level probe and its T-derivative.

    Low-temperature model: only the decay channel survives and the rate's
    own temperature derivative is negligible, so all sensitivity sits in
    the level splitting, whose derivative is 2 * s_dot. Starting from
    sqrt(1-a)|0> + sqrt(a)|1> the no-jump branch is the pure state
    exp(-(t/2) gamma |1><1|) |psi0> and the jump branch accumulates
    probability a (1 - e^{-gamma t}) in the ground state. With
    ``ancilla=True`` the same branches live on two qubits prepared as
    sqrt(1-a)|00> + sqrt(a)|11>, and the jump branch |01> is orthogonal to
    the no-jump parity sector, making the state a direct sum.

    Returns (rho_t, drho_t/dT) in the lab frame (splitting w_tilde).
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"population a must lie in [0, 1], got {a}")
    if t < 0:
        raise ValueError(f"duration must be >= 0, got {t}")
    decay = math.exp(-0.5 * gamma * t)
    p_jump = a * (-math.expm1(-gamma * t))
    # basis order puts the ground state first, so sigma_z = diag(-1, +1)
    # (the splitting w_tilde is the excited-minus-ground energy)
    if not ancilla:
        psi = np.array([math.sqrt(1.0 - a), math.sqrt(a) * decay], dtype=complex)
        rho_d = np.outer(psi, psi.conj())
        rho_d[0, 0] += p_jump
        sz = np.diag([-1.0, 1.0]).astype(complex)
    else:
        psi = np.zeros(4, dtype=complex)
        psi[0] = math.sqrt(1.0 - a)            # |00>
        psi[3] = math.sqrt(a) * decay          # |11>
        rho_d = np.outer(psi, psi.conj())
        rho_d[1, 1] += p_jump                  # |01>: probe decayed
        sz = np.diag([-1.0, -1.0, 1.0, 1.0]).astype(complex)  # sigma_z on probe
    u = np.diag(np.exp(-0.5j * w_tilde * t * np.diag(sz).real))
    # d rho / dT: only the phase w_tilde depends on T, d w_tilde / dT = 2 s_dot
    comm = sz @ rho_d - rho_d @ sz
    drho_d = -0.5j * t * (2.0 * s_dot) * comm
    rho_t = u @ rho_d @ u.conj().T
    drho_t = u @ drho_d @ u.conj().T
    return rho_t, drho_t


def ramsey(a, t, gamma=1.0, s_dot=1.0):
    """QFI of plain interferometry: 16 s^2 t^2 e^{-gamma t} (a - a^2)."""
    return 16.0 * s_dot ** 2 * t * t * math.exp(-gamma * t) * (a - a * a)


def ancilla_parity(a, t, gamma=1.0, s_dot=1.0):
    """QFI with an entangled ancilla and parity readout.

    The direct-sum structure keeps the no-jump coherence alive:
    16 (1-a) a t^2 s^2 / ((1-a) e^{gamma t} + a).
    """
    return (16.0 * (1.0 - a) * a * t * t * s_dot ** 2
            / ((1.0 - a) * math.exp(gamma * t) + a))


def fast_detection(a, t_wait, gamma=1.0, s_dot=1.0):
    """Continuously monitored parity with immediate reset on error.

    Returns (mean_qfi, mean_duration) of a single trial: the only
    informative branch is "no jump for t_wait", whose conditional QFI times
    its probability reproduces the ancilla-parity closed form (the
    denominator's "+a" follows from that product; an explicit SLD
    computation on the constructed state confirms it). The mean duration
    accounts for trials cut short by a detected jump,
    [a (1 - e^{-gamma t}) + (1-a) gamma t] / gamma.
    """
    mean_qfi = ancilla_parity(a, t_wait, gamma=gamma, s_dot=s_dot)
    mean_duration = (a * (-math.expm1(-gamma * t_wait))
                     + (1.0 - a) * gamma * t_wait) / gamma
    return mean_qfi, mean_duration


def _objective(kind):
    if kind == "ramsey":
        return lambda a, t: ramsey(a, t) / t
    if kind == "ancilla":
        return lambda a, t: ancilla_parity(a, t) / t
    if kind == "fast":
        def rate(a, t):
            mq, md = fast_detection(a, t)
            return mq / md
        return rate
    raise ValueError(f"unknown strategy kind {kind!r}")


def _oracle_rate(kind, a, t):
    """Fisher rate recomputed through the SLD on the constructed state."""
    ancilla = kind != "ramsey"
    rho, drho = qubit_closed_form_state(a, t, ancilla=ancilla)
    f = qfi(rho, drho)
    if kind == "fast":
        _, md = fast_detection(a, t)
        return f / md
    return f / t


def optimize_strategy(kind):
    """Maximize the Fisher rate of one strategy over (a, t).

    Deterministic recipe: a 64 x 64 grid over a in [0, 1], t in
    [0.05, 10]/gamma locates the basin, then coordinate-wise golden-section
    refinement to 1e-10. Works in units gamma = s_dot = 1, so fi_rate
    equals the dimensionless coefficient r.
    """
    rate = _objective(kind)
    avals = np.linspace(0.0, 1.0, _GRID_N)
    tvals = np.linspace(_T_LO, _T_HI, _GRID_N)
    grid = np.array([[rate(a, t) for t in tvals] for a in avals])
    ia, it = np.unravel_index(int(np.argmax(grid)), grid.shape)
    a0, t0 = float(avals[ia]), float(tvals[it])

    def golden_max(f, lo, hi):
        x, v = golden_section_min(lambda z: -f(z), lo, hi, tol=_GOLDEN_TOL)
        return x, -v

    val = grid[ia, it]
    for _ in range(40):
        a_lo = max(0.0, a0 - 0.05)
        a_hi = min(1.0, a0 + 0.05)
        a0, _ = golden_max(lambda a: rate(a, t0), a_lo, a_hi)
        t_lo = max(_T_LO, t0 - 0.5)
        t_hi = min(_T_HI, t0 + 0.5)
        t0, new_val = golden_max(lambda t: rate(a0, t), t_lo, t_hi)
        if abs(new_val - val) <= 1e-13 * max(1.0, abs(new_val)):
            val = new_val
            break
        val = new_val

    return StrategyResult(
        kind=kind, fi_rate=val, r_coefficient=val,
        a_opt=a0, t_opt=t0, oracle_rate=_oracle_rate(kind, a0, t0),
    )
