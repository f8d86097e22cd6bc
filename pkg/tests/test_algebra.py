import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from rmtprod.algebra import (DysonIndex, FieldMatrix, SpectrumWithMultiplicity, collapse_kramers,
                             eigenvalues_hermitian, gaussian_field, gram, haar_batch, haar_sample,
                             pair_values, polar_square, quaternion_defect, validate_symmetry)
from rmtprod.errors import NotHermitian, PairingFailure, SpecValidationError

from conftest import SEED


@pytest.mark.parametrize("beta, gamma, gamma_tilde", [(1, 1, 2), (2, 1, 1), (4, 2, 1)])
def test_dyson_constants(beta, gamma, gamma_tilde):
    d = DysonIndex(beta)
    assert (d.gamma, d.gamma_tilde) == (gamma, gamma_tilde)
    assert d.beta_tilde * beta == 4
    assert d.gamma * d.gamma_tilde == (1 if beta == 2 else 2)


def test_dyson_rejects_other_indices():
    with pytest.raises(SpecValidationError):
        DysonIndex(3)


def test_gram_examples():
    assert gram(FieldMatrix("real", [[2.0]])).data[0, 0] == 4
    assert gram(FieldMatrix("complex", [[1j]])).data[0, 0] == 1
    q = FieldMatrix.from_quaternion(1.0, 1.0)
    np.testing.assert_allclose(gram(q).data, 2 * np.eye(2), atol=1e-15)
    np.testing.assert_allclose(eigenvalues_hermitian(gram(q)).values, [2, 2])


def test_eigenvalues_examples():
    np.testing.assert_allclose(eigenvalues_hermitian(np.eye(3)).values, [1, 1, 1])
    np.testing.assert_allclose(eigenvalues_hermitian(np.diag([3.0, 1.0])).values, [1, 3])
    with pytest.raises(NotHermitian):
        eigenvalues_hermitian(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_collapse_kramers_examples():
    assert list(collapse_kramers(SpectrumWithMultiplicity(np.array([2.0, 2.0]))).values) == [2]
    out = collapse_kramers(SpectrumWithMultiplicity(np.array([1.0, 1.0, 5.0, 5.0])))
    assert list(out.values) == [1, 5] and out.kramers_collapsed
    with pytest.raises(PairingFailure):
        collapse_kramers(SpectrumWithMultiplicity(np.array([1.0, 2.0])), tol=1e-8)


def test_validate_symmetry_examples():
    real = FieldMatrix("real", [[1.0, 1e-3j]])
    assert not validate_symmetry(real)
    assert validate_symmetry(FieldMatrix.from_quaternion([[1 + 2j]], [[0.5 - 1j]]))
    assert validate_symmetry(FieldMatrix("complex", np.arange(4).reshape(2, 2) * 1j))
    broken = FieldMatrix.from_quaternion([[1.0]], [[1.0]]).data.copy()
    broken[0, 0] += 1e-6
    assert not validate_symmetry(FieldMatrix("quaternion", broken))


@pytest.mark.parametrize("beta", [1, 2, 4])
@pytest.mark.parametrize("N", [1, 3, 8])
def test_haar_unitary_and_structured(beta, N, rng):
    U = haar_sample(beta, N, rng)
    eye = np.eye(U.data.shape[0])
    assert np.abs(U.data.conj().T @ U.data - eye).max() < 1e-12
    assert validate_symmetry(U)
    if beta == 1:
        assert np.all(U.data.imag == 0)


def test_haar_u1_is_a_phase(rng):
    u = haar_sample(2, 1, rng).data[0, 0]
    assert abs(abs(u) - 1) < 1e-14


def test_haar_entry_beta_law():
    # |u_11|^2 of a Haar unitary in U(N) is Beta(1, N-1); CDF checked by quadrature
    N = 8
    U = haar_batch(2, N, np.random.default_rng(SEED), size=10_000)
    x = np.abs(U[:, 0, 0]) ** 2
    assert abs(integrate.quad(stats.beta(1, N - 1).pdf, 0, 1)[0] - 1) < 1e-12
    assert stats.kstest(x, stats.beta(1, N - 1).cdf).pvalue > 0.01


@given(n=st.integers(1, 32), seed=st.integers(0, 2**32 - 1))
def test_quaternion_gram_kramers_pairs(n, seed):
    rng = np.random.default_rng(seed)
    W = FieldMatrix("quaternion", gaussian_field(4, n, n, rng))
    spec = eigenvalues_hermitian(gram(W))
    assert spec.values.min() >= -1e-10 * spec.values.max()
    collapsed = collapse_kramers(spec)
    assert len(collapsed) == len(spec) // 2


@given(beta=st.sampled_from([1, 2, 4]), n=st.integers(1, 6), nu=st.integers(0, 3),
       seed=st.integers(0, 2**32 - 1))
def test_polar_square_keeps_gram(beta, n, nu, seed):
    rng = np.random.default_rng(seed)
    W = gaussian_field(beta, n, n + nu, rng)
    S = polar_square(W, beta, rng)
    g = DysonIndex(beta).gamma
    assert S.shape == (g * n, g * n)
    scale = np.abs(W @ W.conj().T).max()
    assert np.abs(S @ S.conj().T - W @ W.conj().T).max() < 1e-12 * scale
    if beta == 4:
        assert quaternion_defect(S) < 1e-12
    if beta == 1:
        assert not np.iscomplexobj(S)


def test_pair_values_floor_for_tiny_eigenvalues():
    # tiny Gram eigenvalues are known only to absolute precision
    vals = np.array([1e-18, 3e-18, 4.0, 4.0])
    np.testing.assert_allclose(pair_values(vals), [2e-18, 4.0])
