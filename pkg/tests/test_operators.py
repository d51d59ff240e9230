import numpy as np
import pytest

from thermoq.operators import (
    expm_action,
    hermitian,
    hermitian_eig,
    operator_norm_psd,
    projector_family,
    span_membership,
    tensor,
    validate_projector_family,
)

RNG = np.random.default_rng(20240811)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def random_hermitian(n, rng=RNG):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (X + X.conj().T)


def random_unitary(n, rng=RNG):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(X)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


class TestNormPsd:
    def test_identity(self):
        assert operator_norm_psd(np.eye(3)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert operator_norm_psd(np.diag([0.2, 5.0, 1.1])) == pytest.approx(5.0)

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            operator_norm_psd(np.diag([1.0, -0.5]))

    def test_unitary_invariance(self):
        for _ in range(5):
            M = random_hermitian(4)
            M = M @ M.conj().T  # PSD
            U = random_unitary(4)
            assert operator_norm_psd(U @ M @ U.conj().T) == pytest.approx(
                operator_norm_psd(M), rel=1e-10)


class TestSpanMembership:
    def test_exact_member(self):
        b1 = np.diag([1.0, 0.0]).astype(complex)
        b2 = np.diag([0.0, 1.0]).astype(complex)
        inside, resid, coeffs = span_membership(3.0 * b1 + 2.0 * b2, [b1, b2])
        assert inside and resid < 1e-12
        assert coeffs == pytest.approx([3.0, 2.0])

    def test_orthogonal_complement(self):
        basis = [np.eye(2, dtype=complex), np.diag([0.0, 1.0]).astype(complex)]
        inside, resid, _ = span_membership(SX, basis)
        assert not inside
        assert resid == pytest.approx(np.linalg.norm(SX), rel=1e-12)

    def test_zero_operator_in_any_span(self):
        inside, resid, _ = span_membership(np.zeros((2, 2)), [SX])
        assert inside and resid < 1e-14

    def test_sigma_z_in_projector_span(self):
        basis = [np.eye(2, dtype=complex),
                 np.diag([0.0, 1.0]).astype(complex),
                 np.diag([1.0, 0.0]).astype(complex)]
        inside, resid, _ = span_membership(SZ, basis)
        assert inside and resid < 1e-12

    def test_residual_invariant_under_rebasing(self):
        basis = [random_hermitian(3) for _ in range(3)]
        target = random_hermitian(3)
        _, resid, _ = span_membership(target, basis)
        mix = RNG.normal(size=(3, 3)) + np.eye(3)  # invertible w.h.p.
        rebased = [sum(mix[i, j] * basis[j] for j in range(3)) for i in range(3)]
        _, resid2, _ = span_membership(target, rebased)
        assert resid2 == pytest.approx(resid, rel=1e-8, abs=1e-10)


class TestEigAndProjectors:
    def test_pauli_z_spectrum(self):
        evals, _ = hermitian_eig(SZ)
        assert evals == pytest.approx([-1.0, 1.0])

    def test_reconstruction(self):
        for n in (2, 4, 7):
            M = random_hermitian(n)
            evals, evecs = hermitian_eig(M)
            back = evecs @ np.diag(evals) @ evecs.conj().T
            assert np.linalg.norm(back - M) < 1e-10

    def test_degenerate_grouping(self):
        H = np.diag([1.0, 1.0 + 1e-12, 3.0]).astype(complex)
        labels, projs = projector_family(H)
        assert len(labels) == 2
        assert projs[0].trace().real == pytest.approx(2.0)
        validate_projector_family(projs)

    def test_family_axioms_on_random_operator(self):
        labels, projs = projector_family(random_hermitian(5))
        validate_projector_family(projs)
        assert np.all(np.diff(labels) > 0)


class TestExpmAction:
    def test_zero_generator(self):
        v = np.array([1.0, 2.0, 3.0])
        assert expm_action(np.zeros((3, 3)), v, 1.7) == pytest.approx(v)

    def test_truncated_series_oracle(self):
        G = RNG.normal(size=(4, 4)) + 1j * RNG.normal(size=(4, 4))
        G /= np.linalg.norm(G)
        v = RNG.normal(size=4) + 1j * RNG.normal(size=4)
        t = 0.3
        term = v.astype(complex)
        series = term.copy()
        for k in range(1, 40):
            term = (t / k) * (G @ term)
            series += term
        out = expm_action(G, v, t)
        assert np.linalg.norm(out - series) / np.linalg.norm(series) < 1e-9


def test_tensor_matches_kron():
    A = random_hermitian(2)
    B = random_hermitian(3)
    assert np.allclose(tensor(A, B), np.kron(A, B))


def test_hermitian_rejects_nonhermitian():
    with pytest.raises(ValueError):
        hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
