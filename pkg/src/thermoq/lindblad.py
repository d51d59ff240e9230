"""Markovian probe models: jump channels, microscopic construction, propagation.

A model is a Hamiltonian plus a family of labeled jump channels whose
operators connect orthogonal subspaces of the probe. The temperature enters
through the channel rates, and through the thermal part of the induced
frequency shift; propagation can carry the state's temperature sensitivity
along exactly via an augmented (block-triangular) generator.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .operators import (
    DEGENERACY_GAP,
    expm_action,
    hermitian,
    projector_family,
    validate_projector_family,
)

_BLOCK_TOL = 1e-10


@dataclass(frozen=True)
class JumpChannel:
    """One labeled jump: operator A, rate gamma >= 0 and its T-derivative.

    ``transitions`` lists the ordered (from_label, to_label) subspace pairs
    the operator connects; A equals the sum of its blocks over these pairs.
    """

    omega: float
    A: np.ndarray
    gamma: float
    dgamma_dT: float
    transitions: tuple = ()

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"rate must be >= 0, got {self.gamma}")


@dataclass(frozen=True)
class LindbladModel:
    """Probe Hamiltonian, frequency-shift terms, subspaces and jump channels."""

    H: np.ndarray
    H_LS: np.ndarray
    dH_LS_dT: np.ndarray
    labels: np.ndarray
    projectors: list = field(repr=False)
    channels: tuple = ()

    @property
    def dim(self):
        return self.H.shape[0]

    def projector(self, label):
        idx = int(np.argmin(np.abs(self.labels - label)))
        if abs(self.labels[idx] - label) > DEGENERACY_GAP:
            raise KeyError(f"no subspace labeled {label}")
        return self.projectors[idx]


def _channel_transitions(A, labels, projectors):
    """Ordered (from, to) label pairs on which A has a nonzero block."""
    scale = max(1.0, float(np.linalg.norm(A)))
    out = []
    for i, Pi in enumerate(projectors):          # target
        for j, Pj in enumerate(projectors):      # source
            if np.linalg.norm(Pi @ A @ Pj) > _BLOCK_TOL * scale:
                out.append((float(labels[j]), float(labels[i])))
    return tuple(out)


def validate_model(model, rng_seed=7, n_random=20):
    """Check the structural invariants of a model.

    * the projector family is a valid orthogonal resolution of identity;
    * every channel operator equals the sum of its subspace blocks;
    * each ordered pair of distinct subspaces appears in at most one channel;
    * the generator annihilates the trace on random states.
    """
    validate_projector_family(model.projectors)
    seen = {}
    for ch in model.channels:
        blocks = np.zeros_like(ch.A)
        for (src, dst) in ch.transitions:
            blocks = blocks + model.projector(dst) @ ch.A @ model.projector(src)
        if np.linalg.norm(blocks - ch.A) > _BLOCK_TOL * max(1.0, np.linalg.norm(ch.A)):
            raise ValueError(
                f"channel omega={ch.omega}: operator is not supported on its "
                "declared subspace transitions"
            )
        for pair in ch.transitions:
            if abs(pair[0] - pair[1]) <= DEGENERACY_GAP:
                continue  # diagonal (omega = 0) blocks are exempt
            if pair in seen and seen[pair] != ch.omega:
                raise ValueError(
                    f"transition pair {pair} appears in channels "
                    f"omega={seen[pair]} and omega={ch.omega}"
                )
            seen[pair] = ch.omega
    rng = np.random.default_rng(rng_seed)
    d = model.dim
    for _ in range(n_random):
        X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rho = X @ X.conj().T
        rho /= np.trace(rho).real
        if abs(np.trace(generator_apply(model, rho))) > 1e-10:
            raise ValueError("generator does not preserve the trace")
    return model


def build_microscopic(H, A, bath):
    """Global-basis model from probe Hamiltonian H and coupling operator A.

    H is diagonalized into a projector family {Pi_eps}; for every transition
    frequency omega = eps_src - eps_dst with a nonzero block the jump
    operator A_omega = sum Pi_dst A Pi_src is formed. ``bath`` maps each
    omega (merged within the degeneracy gap) to a tuple
    (gamma, dgamma_dT, s, s_dot); the shift terms are assembled as
    H_LS = sum s_omega A_omega^dag A_omega and its derivative likewise.

    Raises KeyError when a required transition frequency is missing from
    the bath map.
    """
    H = hermitian(H)
    A = hermitian(A)
    labels, projectors = projector_family(H)
    scale = max(1.0, float(np.linalg.norm(A)))

    # Collect nonzero blocks, merging Bohr frequencies within the gap.
    groups = {}  # representative omega -> list of (src_idx, dst_idx)
    for i in range(len(labels)):        # target eps
        for j in range(len(labels)):    # source eps'
            block = projectors[i] @ A @ projectors[j]
            if np.linalg.norm(block) <= _BLOCK_TOL * scale:
                continue
            omega = float(labels[j] - labels[i])
            for rep in groups:
                if abs(rep - omega) <= DEGENERACY_GAP:
                    groups[rep].append((j, i))
                    break
            else:
                groups[omega] = [(j, i)]

    def bath_entry(omega):
        for key, val in bath.items():
            if abs(key - omega) <= DEGENERACY_GAP:
                return val
        raise KeyError(
            f"bath map is missing transition frequency {omega}; "
            f"available: {sorted(bath)}"
        )

    dim = H.shape[0]
    channels = []
    H_LS = np.zeros((dim, dim), dtype=complex)
    dH_LS = np.zeros((dim, dim), dtype=complex)
    for omega in sorted(groups):
        gamma, dgamma, s, s_dot = bath_entry(omega)
        A_om = np.zeros((dim, dim), dtype=complex)
        transitions = []
        for (j, i) in groups[omega]:
            A_om += projectors[i] @ A @ projectors[j]
            transitions.append((float(labels[j]), float(labels[i])))
        AdA = A_om.conj().T @ A_om
        H_LS += s * AdA
        dH_LS += s_dot * AdA
        channels.append(JumpChannel(
            omega=omega, A=A_om, gamma=gamma, dgamma_dT=dgamma,
            transitions=tuple(transitions),
        ))

    model = LindbladModel(
        H=H, H_LS=hermitian(H_LS), dH_LS_dT=hermitian(dH_LS),
        labels=labels, projectors=projectors, channels=tuple(channels),
    )
    return validate_model(model)


def model_from_channels(H, H_LS, dH_LS_dT, channels, projectors=None, labels=None):
    """Model with directly injected channels (no microscopic derivation).

    When no projector family is supplied the one diagonalizing H is used;
    channel transition lists are derived from the operators' nonzero blocks.
    """
    H = hermitian(H)
    if projectors is None:
        labels, projectors = projector_family(H)
    else:
        labels = np.asarray(labels, dtype=float)
    full = []
    for ch in channels:
        trans = ch.transitions or _channel_transitions(ch.A, labels, projectors)
        full.append(JumpChannel(
            omega=ch.omega, A=np.asarray(ch.A, dtype=complex),
            gamma=ch.gamma, dgamma_dT=ch.dgamma_dT, transitions=trans,
        ))
    model = LindbladModel(
        H=H, H_LS=hermitian(H_LS), dH_LS_dT=hermitian(dH_LS_dT),
        labels=labels, projectors=projectors, channels=tuple(full),
    )
    return validate_model(model)


def generator_apply(model, rho):
    """Right-hand side -i[H + H_LS, rho] + sum_w gamma_w D[A_w](rho)."""
    Htot = model.H + model.H_LS
    out = -1j * (Htot @ rho - rho @ Htot)
    for ch in model.channels:
        if ch.gamma == 0.0:
            continue
        A = ch.A
        AdA = A.conj().T @ A
        out += ch.gamma * (A @ rho @ A.conj().T - 0.5 * (AdA @ rho + rho @ AdA))
    return out


def _superoperator(Hc, channel_terms):
    """Matrix of rho -> -i[Hc, rho] + sum_k g_k D[A_k](rho) on row-major vec."""
    dim = Hc.shape[0]
    eye = np.eye(dim)
    L = -1j * (np.kron(Hc, eye) - np.kron(eye, Hc.T))
    for g, A in channel_terms:
        if g == 0.0:
            continue
        AdA = A.conj().T @ A
        L += g * (np.kron(A, A.conj())
                  - 0.5 * (np.kron(AdA, eye) + np.kron(eye, AdA.T)))
    return L


def generator_matrix(model):
    """Dense superoperator matrix of the model's generator."""
    Htot = model.H + model.H_LS
    return _superoperator(Htot, [(ch.gamma, ch.A) for ch in model.channels])


def dgenerator_matrix(model):
    """Temperature derivative of the generator (rates and shift term)."""
    return _superoperator(model.dH_LS_dT,
                          [(ch.dgamma_dT, ch.A) for ch in model.channels])


def evolve_with_sensitivity(model, rho0, t, drho0_dT=None):
    """Propagate (rho, d rho/dT) for time t under the augmented generator.

    The pair obeys d/dt (rho, sigma) = (L rho, L sigma + dL rho); the exact
    block-triangular exponential is used rather than finite differences
    because downstream Fisher information is quadratic in sigma and would
    amplify differencing noise. sigma(0) defaults to zero (temperature
    independent preparation).
    """
    if t < 0:
        raise ValueError(f"duration must be >= 0, got {t}")
    dim = model.dim
    L = generator_matrix(model)
    dL = dgenerator_matrix(model)
    aug = np.block([[L, np.zeros_like(L)], [dL, L]])
    sigma0 = np.zeros((dim, dim), dtype=complex) if drho0_dT is None else drho0_dT
    y0 = np.concatenate([np.asarray(rho0, dtype=complex).ravel(),
                         np.asarray(sigma0, dtype=complex).ravel()])
    y = expm_action(aug, y0, t)
    rho_t = y[:dim * dim].reshape(dim, dim)
    sigma_t = y[dim * dim:].reshape(dim, dim)
    # symmetrize away roundoff drift
    rho_t = 0.5 * (rho_t + rho_t.conj().T)
    sigma_t = 0.5 * (sigma_t + sigma_t.conj().T)
    return rho_t, sigma_t


# --- concrete probes -------------------------------------------------------

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
# basis order (|g>, |e>): ground first, so sigma_z has the excited state up
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)


def thermal_bath_map(w, T, density):
    """Bath map for the two transition frequencies +/- w of a thermal sample.

    Emission (+w) carries (gamma_plus, dgamma, s_w = -(delta_T + delta),
    s_dot_w = -ddeltaT); absorption (-w) carries (gamma_minus, dgamma,
    s_{-w} = delta_T, +ddeltaT).
    """
    resp = spectral.bath_response(w, T, density)
    return {
        +w: (resp.gamma_plus, resp.dgamma_dT,
             -(resp.delta_T + resp.delta), -resp.ddeltaT_dT),
        -w: (resp.gamma_minus, resp.dgamma_dT,
             resp.delta_T, resp.ddeltaT_dT),
    }


def qubit_probe_model(w, T, density, include_lamb=True):
    """Two-level probe H = (w/2) sigma_z coupled through sigma_x.

    The microscopic construction yields the lowering/raising jump pair
    A_{+w} = |g><e| and A_{-w} = |e><g| with thermal rates. With
    ``include_lamb=False`` the shift terms are dropped (rates only), which
    is the regime every fast measure-and-prepare result lives in.
    """
    if include_lamb:
        bath = thermal_bath_map(w, T, density)
    else:
        gp, gm, dg = spectral.jump_rates(w, T, density)
        bath = {+w: (gp, dg, 0.0, 0.0), -w: (gm, dg, 0.0, 0.0)}
    H = 0.5 * w * SIGMA_Z
    return build_microscopic(H, SIGMA_X, bath)
