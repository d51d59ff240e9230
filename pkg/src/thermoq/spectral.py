"""Response functions of a bosonic sample with a power-law spectral density.

Everything thermal is expressed through the Bose occupation N(w) and its
temperature derivative; the coherent (principal-value) response is obtained
by singularity-subtracted adaptive quadrature. Units: k_B = hbar = 1, so
temperatures and frequencies share units.

Sign conventions for the frequency-shift coefficients: the emission-channel
coefficient is s_w = -(delta_T + delta) and the absorption one is
s_{-w} = +delta_T, so ds_w/dT = -d(delta_T)/dT. Every precision bound in
this package depends only on the square of that derivative, so
``BathResponse`` stores the raw d(delta_T)/dT alongside ``s_dot`` and the
sign choice is documentation, not physics.
"""

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .util import ConvergenceError

# Fixed quadrature controls; constants so downstream results are reproducible.
_QUAD_ABS_TOL = 1e-10
_QUAD_REL_TOL = 1e-12
_QUAD_LIMIT = 800
# Infrared cutoff for the thermal principal-value integrals. For ohmicity
# alpha = 0 the integrand J(x)N(x)/(x-w) carries a non-integrable ~T/x tail
# at x -> 0 and the integral is log-divergent; cutting at a fixed tiny x
# regularizes it without touching any alpha > 0 result (the remainder below
# the cutoff is O(x_ir^alpha)). The low-temperature exponent of delta_T is
# insensitive to the cutoff; only the alpha = 0 prefactor depends on it.
_X_INFRARED = 1e-280


@dataclass(frozen=True)
class OhmicDensity:
    """Power-law spectral density J(x) = g * x**alpha on 0 < x <= cutoff."""

    g: float
    alpha: float
    cutoff: float

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"coupling g must be positive, got {self.g}")
        if not self.alpha >= 0:
            raise ValueError(f"ohmicity alpha must be >= 0, got {self.alpha}")
        if not self.cutoff > 0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")

    def __call__(self, x):
        if x <= 0 or x > self.cutoff:
            return 0.0
        return self.g * x**self.alpha


@dataclass(frozen=True)
class BathResponse:
    """Jump rates and frequency-shift integrals of the sample at one frequency.

    gamma_plus / gamma_minus: emission / absorption rates (gamma_minus <=
    gamma_plus, detailed balance gamma_minus = exp(-w/T) * gamma_plus).
    dgamma_dT is shared by both channels. delta is the temperature
    independent shift, delta_T the thermal one, ddeltaT_dT its temperature
    derivative, and s_dot = -ddeltaT_dT (see module docstring).
    """

    w: float
    T: float
    gamma_plus: float
    gamma_minus: float
    dgamma_dT: float
    delta: float
    delta_T: float
    ddeltaT_dT: float

    @property
    def s_dot(self):
        return -self.ddeltaT_dT


def bose_occupation(w, T):
    """Bose occupation N(w) = 1/(exp(w/T) - 1), exactly 0 at T = 0.

    Evaluated as exp(-w/T)/(1 - exp(-w/T)) with expm1 in the denominator,
    which stays accurate both for w/T >> 1 (underflows cleanly to 0) and
    for w/T << 1 (no cancellation).
    """
    if w <= 0:
        raise ValueError(f"frequency must be positive, got {w}")
    if T < 0:
        raise ValueError(f"temperature must be >= 0, got {T}")
    if T == 0.0:
        return 0.0
    r = w / T
    return math.exp(-r) / (-math.expm1(-r))


def bose_occupation_dT(w, T):
    """Temperature derivative dN/dT = (w/T**2) exp(w/T) N(w)**2.

    Factored as (r/em) * (exp(-r)/em) / T with em = 1 - exp(-r), r = w/T,
    so no intermediate overflows or underflows occur for any r > 0.
    """
    if w <= 0:
        raise ValueError(f"frequency must be positive, got {w}")
    if T <= 0:
        raise ValueError(f"temperature must be positive, got {T}")
    r = w / T
    em = -math.expm1(-r)
    return (r / em) * (math.exp(-r) / em) / T


def jump_rates(w, T, density):
    """Emission/absorption rates of the sample at frequency w.

    gamma_plus = 2*pi*J(w)*(1 + N(w)), gamma_minus = 2*pi*J(w)*N(w), and
    the common temperature derivative 2*pi*J(w)*dN/dT. Frequencies above
    the cutoff are a domain error: the rate there is identically zero and
    callers must treat such transitions explicitly.
    """
    if w <= 0:
        raise ValueError(f"frequency must be positive, got {w}")
    if w > density.cutoff:
        raise ValueError(
            f"frequency {w} exceeds the spectral cutoff {density.cutoff}"
        )
    two_pi_j = 2.0 * math.pi * density(w)
    n = bose_occupation(w, T)
    ndot = bose_occupation_dT(w, T) if T > 0 else 0.0
    return two_pi_j * (1.0 + n), two_pi_j * n, two_pi_j * ndot


def _quad_checked(f, a, b, points=None):
    val, err, info, *msg = quad(
        f, a, b,
        epsabs=_QUAD_ABS_TOL, epsrel=_QUAD_REL_TOL, limit=_QUAD_LIMIT,
        points=points, full_output=1,
    )
    if msg:
        raise ConvergenceError(f"quadrature failed on [{a}, {b}]: {msg[0]}")
    return val


def principal_value_integral(f, w, upper, lower=0.0):
    """Cauchy principal value of integral of f(x)/(x - w) over [lower, upper].

    Uses singularity subtraction,

        PV = int (f(x) - f(w))/(x - w) dx + f(w) * log((upper-w)/(w-lower)),

    which leaves a bounded integrand whenever f is continuous; the regular
    part is integrated adaptively to absolute tolerance 1e-10.
    """
    if not (lower < w < upper):
        raise ValueError(f"pole {w} must lie inside ({lower}, {upper})")
    fw = f(w)

    def regular(x):
        dx = x - w
        if abs(dx) < 1e-12:
            h = 1e-7 * max(1.0, abs(w))
            return (f(w + h) - f(w - h)) / (2.0 * h)
        return (f(x) - fw) / dx

    val = _quad_checked(regular, lower, upper, points=[w])
    return val + fw * math.log((upper - w) / (w - lower))


def _thermal_pv(w, density, occupation):
    """PV integral of J(x)*occupation(x)/(x - w) with an infrared-safe split.

    The region below w/2 has no pole but can concentrate all of the thermal
    weight at x ~ T << w; a log substitution x = exp(u) makes that part
    smooth. The remainder [w/2, cutoff] is handled by subtraction at the
    pole.
    """
    omega = density.cutoff
    c = 0.5 * w

    def f(x):
        return density(x) * occupation(x)

    def low(u):
        x = math.exp(u)
        return f(x) * x / (x - w)

    val = _quad_checked(low, math.log(_X_INFRARED), math.log(c))

    fw = f(w)

    def regular(x):
        dx = x - w
        if abs(dx) < 1e-12:
            h = 1e-7 * max(1.0, abs(w))
            return (f(w + h) - f(w - h)) / (2.0 * h)
        return (f(x) - fw) / dx

    val += _quad_checked(regular, c, omega, points=[w])
    val += fw * math.log((omega - w) / (w - c))
    return val


def lamb_shifts(w, T, density):
    """Frequency-shift integrals (delta, delta_T, ddeltaT_dT) at frequency w.

    delta   = PV int J(x)/(x-w) dx              (temperature independent)
    delta_T = PV int J(x) N(x)/(x-w) dx         (0 at T = 0)
    ddeltaT_dT differentiates under the integral with dN/dT.
    """
    if not (0 < w < density.cutoff):
        raise ValueError(
            f"frequency {w} must lie inside (0, {density.cutoff})"
        )
    if T < 0:
        raise ValueError(f"temperature must be >= 0, got {T}")
    delta = principal_value_integral(density, w, density.cutoff)
    if T == 0.0:
        return delta, 0.0, 0.0
    delta_T = _thermal_pv(w, density, lambda x: bose_occupation(x, T))
    ddeltaT = _thermal_pv(w, density, lambda x: bose_occupation_dT(x, T))
    return delta, delta_T, ddeltaT


def bath_response(w, T, density):
    """Full :class:`BathResponse` (rates plus shift integrals) at frequency w."""
    gp, gm, dg = jump_rates(w, T, density)
    delta, delta_T, ddeltaT = lamb_shifts(w, T, density)
    return BathResponse(
        w=w, T=T, gamma_plus=gp, gamma_minus=gm, dgamma_dT=dg,
        delta=delta, delta_T=delta_T, ddeltaT_dT=ddeltaT,
    )


def low_T_scaling_exponent(density, w, T_grid):
    """Least-squares slope of log|delta_T| against log T.

    In the regime T << w the thermal shift follows |delta_T| ~ T**(1+alpha),
    so the returned slope estimates 1 + alpha. delta_T itself is negative
    for a pole inside the support (the thermal weight sits below w), hence
    the fit uses the magnitude. All grid temperatures must satisfy
    T <= w/100 and produce nonzero shifts of a single sign.
    """
    import numpy as np

    ts = np.asarray(T_grid, dtype=float)
    if ts.size < 2:
        raise ValueError("need at least two grid temperatures")
    if np.any(ts <= 0) or np.any(ts > w / 100.0):
        raise ValueError(f"grid temperatures must lie in (0, w/100 = {w / 100.0}]")
    vals = np.array([lamb_shifts(w, t, density)[1] for t in ts])
    if np.any(vals == 0.0):
        raise ValueError("delta_T vanished on the grid; slope undefined")
    if not (np.all(vals > 0) or np.all(vals < 0)):
        raise ValueError("delta_T changes sign on the grid; power-law fit invalid")
    slope = np.polyfit(np.log(ts), np.log(np.abs(vals)), 1)[0]
    return float(slope)
