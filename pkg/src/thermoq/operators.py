"""Dense complex Hermitian linear algebra for small probe Hilbert spaces.

Operators are plain complex numpy arrays; these helpers add the validation,
projector bookkeeping and matrix functions the rest of the package needs.
Dimensions stay at desk scale (at most a couple of thousand), so everything
is dense and LAPACK-backed.
"""

import numpy as np
from scipy.linalg import expm

from .util import ConvergenceError

HERMITICITY_TOL = 1e-12
PSD_TOL = 1e-10
DEGENERACY_GAP = 1e-9


def hermitian(M):
    """Validate Hermiticity to 1e-12 (relative) and return (M + M^dag)/2.

    Symmetrizing on construction guards against drift accumulated in
    operator products.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    scale = max(1.0, float(np.linalg.norm(M)))
    if np.linalg.norm(M - M.conj().T) > HERMITICITY_TOL * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    return 0.5 * (M + M.conj().T)


def density_operator(M):
    """Validate a density matrix: Hermitian, PSD (>= -1e-10), unit trace."""
    M = hermitian(M)
    evals = np.linalg.eigvalsh(M)
    if evals.min() < -PSD_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {evals.min():.3e}")
    if abs(np.trace(M).real - 1.0) > PSD_TOL:
        raise ValueError(f"density matrix trace {np.trace(M).real} != 1")
    return M


def operator_norm_psd(M):
    """Largest eigenvalue of a positive semidefinite Hermitian matrix.

    Raises if the smallest eigenvalue is below -1e-8: the caller passed an
    operator that is not PSD, for which this norm formula is wrong.
    """
    M = hermitian(M)
    evals = np.linalg.eigvalsh(M)
    if evals[0] < -1e-8:
        raise ValueError(f"operator is not PSD: min eigenvalue {evals[0]:.3e}")
    return float(evals[-1])


def hermitian_eig(M):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian M."""
    M = hermitian(M)
    evals, evecs = np.linalg.eigh(M)
    return evals, evecs


def span_membership(M, basis, rel_tol=1e-8):
    """Real least-squares membership of Hermitian M in span{basis}.

    Solves min_c || M - sum_i c_i B_i ||_HS over real coefficients and
    returns (in_span, residual, coefficients). Membership means the
    residual is below 1e-8 relative to ||M||_HS; the zero operator is in
    every span.
    """
    M = hermitian(M)
    mats = [hermitian(B) for B in basis]
    if any(B.shape != M.shape for B in mats):
        raise ValueError("basis operators must match the dimension of M")
    # Hermitian matrices form a real vector space; stack real and imaginary
    # parts so the least-squares problem is real.
    def realvec(A):
        flat = A.ravel()
        return np.concatenate([flat.real, flat.imag])

    A = np.column_stack([realvec(B) for B in mats]) if mats else np.zeros((2 * M.size, 0))
    b = realvec(M)
    if A.shape[1] == 0:
        coeffs = np.zeros(0)
        resid = float(np.linalg.norm(b))
    else:
        coeffs, _, _, _ = np.linalg.lstsq(A, b, rcond=None)
        resid = float(np.linalg.norm(b - A @ coeffs))
    norm_m = float(np.linalg.norm(M))
    in_span = resid <= rel_tol * norm_m or norm_m == 0.0
    return in_span, resid, coeffs


def projector_family(H, gap=DEGENERACY_GAP):
    """Spectral projectors of Hermitian H with eigenvalues grouped by ``gap``.

    Eigenvalues closer than the absolute gap are merged into one subspace
    (engineered spectra are deliberately degenerate). Returns (labels,
    projectors) with labels ascending; each label is the mean eigenvalue of
    its group.
    """
    evals, evecs = hermitian_eig(H)
    labels = []
    projectors = []
    start = 0
    for k in range(1, len(evals) + 1):
        if k == len(evals) or evals[k] - evals[k - 1] > gap:
            block = evecs[:, start:k]
            labels.append(float(np.mean(evals[start:k])))
            projectors.append(block @ block.conj().T)
            start = k
    return np.array(labels), projectors


def validate_projector_family(projectors, tol=PSD_TOL):
    """Check idempotence, mutual orthogonality and completeness to ``tol``."""
    if not projectors:
        raise ValueError("empty projector family")
    dim = projectors[0].shape[0]
    total = np.zeros((dim, dim), dtype=complex)
    for i, P in enumerate(projectors):
        if np.linalg.norm(P @ P - P) > tol:
            raise ValueError(f"projector {i} is not idempotent")
        for j in range(i):
            if np.linalg.norm(P @ projectors[j]) > tol:
                raise ValueError(f"projectors {i} and {j} are not orthogonal")
        total += P
    if np.linalg.norm(total - np.eye(dim)) > tol:
        raise ValueError("projector family does not resolve the identity")


def expm_action(G, v, t):
    """Evaluate exp(t*G) @ v by dense scaling-and-squaring.

    G is a general (not necessarily Hermitian) generator; accuracy is at the
    1e-10 relative level or better for the desk-scale matrices used here.
    """
    G = np.asarray(G)
    v = np.asarray(v)
    out = expm(G * t) @ v
    if not np.all(np.isfinite(out)):
        raise ConvergenceError("matrix exponential produced non-finite entries")
    return out


def tensor(A, B):
    """Kronecker product of two operators."""
    return np.kron(np.asarray(A), np.asarray(B))
