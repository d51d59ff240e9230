"""Upper bounds on the achievable Fisher-information rate of a probe.

All bounds are per unit total interaction time and depend only on the jump
operators, their rates and the temperature derivatives of rates and
frequency shifts; none of them requires solving the dynamics. Divergent
bounds (a vanishing rate with a nonvanishing temperature derivative)
return ``math.inf`` rather than raising, so temperature scans can cross
the T = 0 boundary.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import spectral
from .operators import hermitian_eig, operator_norm_psd, span_membership
from .util import grid_golden_max

_TIE_TOL = 1e-12
_DECOMP_TOL = 1e-8


@dataclass(frozen=True)
class BoundReport:
    """A bound value together with the certificate that produced it.

    Certificate fields are populated exactly when the producing operation
    defines them: the attaining subspace label for the fixed-Hamiltonian
    bound, the attaining frequency for frequency-optimized bounds and the
    gauge parameter for the optimized two-level bound.
    """

    rate: float
    attaining_epsilon: float = None
    attaining_omega: float = None
    gauge_x: float = None
    regime: str = None

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError(f"bound rate must be >= 0, got {self.rate}")


def _channel_coefficient(gamma, dgamma, h=0.0):
    """(dgamma^2 + 4 h^2) / gamma with the 0/0 -> 0 convention."""
    num = dgamma * dgamma + 4.0 * h * h
    if gamma == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / gamma


def _bound_operator(model, h_coeffs=None):
    """sum_w coeff_w A_w^dag A_w, or None when a coefficient diverges."""
    dim = model.dim
    M = np.zeros((dim, dim), dtype=complex)
    for ch in model.channels:
        h = 0.0 if h_coeffs is None else h_coeffs.get(ch.omega, 0.0)
        c = _channel_coefficient(ch.gamma, ch.dgamma_dT, h)
        if math.isinf(c):
            return None
        if c != 0.0:
            M += c * (ch.A.conj().T @ ch.A)
    return M


def check_diffusive(model):
    """Span conditions guaranteeing shot-noise (linear-in-time) scaling.

    ``simple`` tests dH_LS/dT against span{1, gamma_w A_w^dag A_w}; a
    vanishing rate zeroes its basis element, which enforces that such a
    channel cannot absorb any part of the shift derivative. ``general``
    uses the full noise-operator span {1, sqrt(gamma) (A + A^dag),
    sqrt(gamma) i(A - A^dag), sqrt(gamma gamma') (A^dag A' + A'^dag A),
    sqrt(gamma gamma') i(A^dag A' - A'^dag A)} and is implied by simple.

    Returns (simple, general, residuals) with the two least-squares
    residuals keyed by condition name.
    """
    dim = model.dim
    eye = np.eye(dim, dtype=complex)
    target = model.dH_LS_dT

    simple_basis = [eye]
    for ch in model.channels:
        simple_basis.append(ch.gamma * (ch.A.conj().T @ ch.A))
    simple, r_simple, _ = span_membership(target, simple_basis)

    general_basis = [eye]
    chs = model.channels
    for ch in chs:
        s = math.sqrt(ch.gamma)
        general_basis.append(s * (ch.A + ch.A.conj().T))
        general_basis.append(s * 1j * (ch.A - ch.A.conj().T))
    for a in range(len(chs)):
        for b in range(a, len(chs)):
            s = math.sqrt(chs[a].gamma * chs[b].gamma)
            X = chs[a].A.conj().T @ chs[b].A
            general_basis.append(s * (X + X.conj().T))
            general_basis.append(s * 1j * (X - X.conj().T))
    general, r_general, _ = span_membership(target, general_basis)

    return simple, general, {"simple": r_simple, "general": r_general}


def _block_certificate(model, M):
    """(eps_star, rate, psi) maximizing the block norm of block-diagonal M.

    Ties within 1e-12 resolve to the smallest label, for determinism.
    """
    best = None
    for label, P in zip(model.labels, model.projectors):
        block = P @ M @ P
        evals, evecs = hermitian_eig(block)
        val = float(evals[-1])
        if best is None or val > best[1] + _TIE_TOL * max(1.0, abs(best[1])):
            best = (float(label), val, evecs[:, -1])
    return best


def bound_fixed_H(model):
    """Rate bound || sum_w (dgamma_w^2 / gamma_w) A_w^dag A_w || for fixed H.

    Valid whenever the shift derivative can be treated as zero. The report
    carries the attaining subspace label; a channel with zero rate but
    nonzero rate derivative makes the bound infinite.
    """
    M = _bound_operator(model)
    if M is None:
        return BoundReport(rate=math.inf, regime="no-lamb")
    eps_star, rate, _ = _block_certificate(model, M)
    # guard: certificate must reproduce the operator norm
    assert abs(rate - operator_norm_psd(M)) <= 1e-9 * max(1.0, rate)
    return BoundReport(rate=rate, attaining_epsilon=eps_star, regime="no-lamb")


def attaining_state(model):
    """(eps_star, psi) saturating the fixed-H bound: the top eigenvector of
    the attaining block of the bound operator."""
    M = _bound_operator(model)
    if M is None:
        raise ValueError("bound is divergent; no attaining state")
    eps_star, _, psi = _block_certificate(model, M)
    return eps_star, psi


def bound_optimal_H(bath, A):
    """Bound max_w (dgamma_w^2/gamma_w) * (spread(A)/2)^2 over engineered H.

    ``bath`` maps candidate transition frequencies to (gamma, dgamma)
    pairs. Returns (report, delta_T, psi_opt): ``delta_T`` is minus the
    attaining frequency (the optimal level splitting) and ``psi_opt`` the
    equal superposition of the two extremal eigenvectors of A, whose
    variance realizes (spread/2)^2.
    """
    if not bath:
        raise ValueError("empty bath map")
    ratios = {om: _channel_coefficient(g, dg) for om, (g, dg) in bath.items()}
    if all(r == 0.0 for r in ratios.values()) and all(
        g == 0.0 for g, _ in bath.values()
    ):
        raise ValueError("all bath rates vanish")
    omega_star = max(sorted(ratios), key=lambda om: ratios[om])
    f_star = ratios[omega_star]
    evals, evecs = hermitian_eig(np.asarray(A))
    spread = float(evals[-1] - evals[0])
    psi = (evecs[:, -1] + evecs[:, 0]) / math.sqrt(2.0)
    rate = f_star * (spread / 2.0) ** 2
    report = BoundReport(rate=rate, attaining_omega=float(omega_star),
                         regime="no-lamb")
    return report, -float(omega_star), psi


def absorption_ratio(w, T, density):
    """dgamma^2 / gamma_minus at frequency w: the frequency-optimization
    objective (the absorption channel always dominates the emission one)."""
    gp, gm, dg = spectral.jump_rates(w, T, density)
    return _channel_coefficient(gm, dg)


def optimal_sample_frequency(T, density, lo=None, hi=None):
    """Maximize the absorption ratio over transition frequencies.

    Fixed 256-point grid plus golden-section refinement to 1e-10, so the
    result is deterministic. Returns (w_star, ratio_star).
    """
    lo = 1e-6 * density.cutoff if lo is None else lo
    hi = density.cutoff * (1.0 - 1e-12) if hi is None else hi
    return grid_golden_max(lambda w: absorption_ratio(w, T, density), lo, hi)


def bound_with_lamb(model, h_coeffs, h_identity=0.0):
    """Gauge-parameterized bound || sum_w ((dgamma_w^2 + 4 h_w^2)/gamma_w)
    A_w^dag A_w || for a given shift decomposition.

    The coefficients must satisfy dH_LS/dT = h_identity * 1 +
    sum_w h_w A_w^dag A_w within relative residual 1e-8 and h_w = 0
    whenever gamma_w = 0; violations raise.
    """
    dim = model.dim
    recon = h_identity * np.eye(dim, dtype=complex)
    for ch in model.channels:
        h = h_coeffs.get(ch.omega, 0.0)
        if ch.gamma == 0.0 and h != 0.0:
            raise ValueError(
                f"h coefficient must vanish on zero-rate channel omega={ch.omega}"
            )
        recon += h * (ch.A.conj().T @ ch.A)
    target = model.dH_LS_dT
    resid = np.linalg.norm(recon - target)
    scale = max(np.linalg.norm(target), 1e-300)
    if resid > _DECOMP_TOL * scale and np.linalg.norm(target) > 0:
        raise ValueError(
            f"shift decomposition residual {resid:.3e} exceeds tolerance"
        )
    if np.linalg.norm(target) == 0 and resid > _DECOMP_TOL:
        raise ValueError("nonzero decomposition supplied for a zero shift")
    M = _bound_operator(model, h_coeffs)
    if M is None:
        return BoundReport(rate=math.inf)
    return BoundReport(rate=operator_norm_psd(M))


def qubit_bound_opt_gauge(gamma_plus, gamma_minus, dgamma, s_dot):
    """Gauge-optimized two-level bound (closed form of the min-max over x).

    The two channel coefficients as functions of the free gauge parameter x
    are upward parabolas

        f_minus(x) = (dgamma^2 + 4 (s + x)^2) / gamma_minus,
        f_plus(x)  = (dgamma^2 + 4 (s - x)^2) / gamma_plus,

    with s = |s_dot| (the bound depends on s_dot only through its square).
    Regime (i): the vertex of f_minus dominates, rate = dgamma^2 /
    gamma_minus at x = -s. Regime (ii): the parabolas cross at

        x* = (-2 s (gp + gm) + sqrt(16 s^2 gp gm - dgamma^2 (gp - gm)^2))
             / (2 (gp - gm)),

    and the rate is 16 s (-x*) / (gp - gm). At gamma_minus = 0 the
    admissibility constraint pins x = -s and the rate is
    (dgamma^2 + 16 s^2) / gamma_plus; at gamma_plus = gamma_minus the
    crossing degenerates to x = 0 with rate (dgamma^2 + 4 s^2) / gamma_plus.
    """
    if not gamma_plus > 0:
        raise ValueError(f"gamma_plus must be positive, got {gamma_plus}")
    if gamma_minus < 0:
        raise ValueError(f"gamma_minus must be >= 0, got {gamma_minus}")
    s = abs(s_dot)
    if gamma_minus == 0.0:
        rate = (dgamma * dgamma + 16.0 * s * s) / gamma_plus
        return BoundReport(rate=rate, gauge_x=-s, regime="lamb-regime-i")
    f_minus_vertex = dgamma * dgamma / gamma_minus
    f_plus_at_vertex = (dgamma * dgamma + 16.0 * s * s) / gamma_plus
    if f_minus_vertex >= f_plus_at_vertex:
        return BoundReport(rate=f_minus_vertex, gauge_x=-s,
                           regime="lamb-regime-i")
    if gamma_plus == gamma_minus:
        # crossing formula degenerates; the symmetric min-max sits at x = 0
        rate = (dgamma * dgamma + 4.0 * s * s) / gamma_plus
        return BoundReport(rate=rate, gauge_x=0.0, regime="lamb-regime-ii")
    diff = gamma_plus - gamma_minus
    disc = 16.0 * s * s * gamma_plus * gamma_minus - dgamma * dgamma * diff * diff
    # regime (ii) guarantees disc > 0: dgamma^2 diff < 16 s^2 gamma_minus
    x_star = (-2.0 * s * (gamma_plus + gamma_minus) + math.sqrt(disc)) / (2.0 * diff)
    rate = 16.0 * s * (-x_star) / diff
    return BoundReport(rate=rate, gauge_x=x_star, regime="lamb-regime-ii")


def qubit_explicit_bound(w, T, density):
    """Closed-form two-level rate bound 2 pi g N^3 e^{2w/T} w^{2+alpha} / T^4.

    Equal (to machine precision) to the fixed-H operator bound of the
    microscopic two-level model; evaluated via q = exp(-w/T) as
    2 pi g w^{2+alpha} q / ((1-q)^3 T^4), which is stable for w/T large.
    """
    if not T > 0:
        raise ValueError(f"temperature must be positive, got {T}")
    if w <= 0 or w > density.cutoff:
        raise ValueError(f"frequency {w} outside (0, {density.cutoff}]")
    q = math.exp(-w / T)
    one_m_q = -math.expm1(-w / T)
    return (2.0 * math.pi * density.g * w ** (2.0 + density.alpha)
            * q / (one_m_q ** 3 * T ** 4))


@dataclass(frozen=True)
class OhmicityBound:
    """Spectral-exponent estimation bound, reported for both channels.

    The rate derivative with respect to the exponent is gamma * ln(w) for
    either channel, so the operator bound reduces to (ln w)^2 * gamma on
    whichever channel has the larger rate (emission, in the convention
    used here). Both per-channel values are kept because the two natural
    labeling conventions swap them.
    """

    rate: float
    attaining_omega: float
    emission_value: float
    absorption_value: float


def ohmicity_bound(w, T, density):
    """Bound on estimating the spectral exponent through a two-level probe.

    d gamma / d alpha = gamma * ln w for both channels, hence
    rate = (ln w)^2 * max(gamma_plus, gamma_minus); at w = 1 the exponent
    is invisible and the bound vanishes.
    """
    gp, gm, _ = spectral.jump_rates(w, T, density)
    lw2 = math.log(w) ** 2
    em, ab = lw2 * gp, lw2 * gm
    if em >= ab:
        return OhmicityBound(rate=em, attaining_omega=+w,
                             emission_value=em, absorption_value=ab)
    return OhmicityBound(rate=ab, attaining_omega=-w,
                         emission_value=em, absorption_value=ab)
