import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rand_complex, rand_hermitian, rand_psd
from isocr import linalg
from isocr.errors import DimensionError, NotHermitianError, NotPSDError
from isocr.linalg import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z


def test_kron_identity():
    np.testing.assert_array_equal(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_zz_on_00():
    zz = linalg.kron(PAULI_Z, PAULI_Z)
    e00 = np.array([1, 0, 0, 0], dtype=complex)
    np.testing.assert_allclose(zz @ e00, e00)


def test_kron_matches_numpy(rng):
    a, b = rand_complex(rng, 2), rand_complex(rng, 3)
    np.testing.assert_allclose(linalg.kron(a, b), np.kron(a, b))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_kron_trace_multiplicative(seed):
    r = np.random.default_rng(seed)
    a, b = rand_complex(r, 2), rand_complex(r, 2)
    assert abs(np.trace(linalg.kron(a, b)) - np.trace(a) * np.trace(b)) < 1e-12


def test_kron_all_order():
    k = linalg.kron_all([PAULI_X, PAULI_I, PAULI_Z])
    np.testing.assert_allclose(k, np.kron(np.kron(PAULI_X, PAULI_I), PAULI_Z))


def test_partial_trace_identity():
    np.testing.assert_allclose(linalg.partial_trace(np.eye(4), [2, 2], {0}), 2 * np.eye(2))


def test_partial_trace_epr():
    v = np.array([1, 0, 0, 1]) / math.sqrt(2)
    phi = np.outer(v, v.conj())
    np.testing.assert_allclose(linalg.partial_trace(phi, [2, 2], {0}), np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(linalg.partial_trace(phi, [2, 2], {1}), np.eye(2) / 2, atol=1e-15)


def test_partial_trace_product_state(rng):
    a, b, c = rand_psd(rng, 2), rand_psd(rng, 3), rand_psd(rng, 2)
    m = np.kron(np.kron(a, b), c)
    np.testing.assert_allclose(linalg.partial_trace(m, [2, 3, 2], {1}),
                               b * np.trace(a) * np.trace(c), atol=1e-12)
    np.testing.assert_allclose(linalg.partial_trace(m, [2, 3, 2], {0, 2}),
                               np.kron(a, c) * np.trace(b), atol=1e-12)


def test_partial_trace_contracts_trace_norm(rng):
    for _ in range(50):
        m = rand_hermitian(rng, 4)
        assert linalg.trace_norm(linalg.partial_trace(m, [2, 2], {0})) <= linalg.trace_norm(m) + 1e-12


def test_partial_trace_bad_dims():
    with pytest.raises(DimensionError):
        linalg.partial_trace(np.eye(4), [2, 3], {0})


def test_permute_factors_swap(rng):
    a, b = rand_complex(rng, 2), rand_complex(rng, 3)
    np.testing.assert_allclose(linalg.permute_factors(np.kron(a, b), [2, 3], [1, 0]), np.kron(b, a))


@pytest.mark.parametrize("m, expected", [
    (np.diag([3.0, 1.0]), [1.0, 3.0]),
    (PAULI_X, [-1.0, 1.0]),
    (PAULI_Y, [-1.0, 1.0]),
    (np.zeros((3, 3)), [0.0, 0.0, 0.0]),
])
def test_hermitian_eig_known_spectra(m, expected):
    np.testing.assert_allclose(linalg.hermitian_eig(m).eigenvalues, expected, atol=1e-14)


def test_hermitian_eig_ginibre_square_is_psd(rng):
    g = rand_complex(rng, 6)
    assert linalg.hermitian_eig(g.conj().T @ g).eigenvalues.min() >= -1e-10


@pytest.mark.parametrize("dim", [1, 2, 3, 5, 8, 16])
def test_hermitian_eig_matches_lapack(rng, dim):
    m = rand_hermitian(rng, dim)
    dec = linalg.hermitian_eig(m)
    np.testing.assert_allclose(dec.eigenvalues, np.linalg.eigvalsh(m), atol=1e-12)
    np.testing.assert_allclose(dec.reconstruct(), m, atol=1e-12)
    v = dec.eigenvectors
    np.testing.assert_allclose(v.conj().T @ v, np.eye(dim), atol=1e-12)
    assert np.all(np.diff(dec.eigenvalues) >= 0)


def test_hermitian_eig_degenerate():
    u = np.linalg.qr(rand_complex(np.random.default_rng(3), 4))[0]
    m = u @ np.diag([1.0, 1.0, 1.0, -2.0]) @ u.conj().T
    np.testing.assert_allclose(linalg.hermitian_eig(m).eigenvalues, [-2, 1, 1, 1], atol=1e-12)


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        linalg.hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


def test_hermitian_eig_symmetrizes_roundoff():
    m = np.array([[1.0, 2.0 + 1e-14], [2.0, 1.0]])
    np.testing.assert_allclose(linalg.hermitian_eig(m).eigenvalues, [-1, 3], atol=1e-12)


def test_non_square_rejected():
    with pytest.raises(DimensionError):
        linalg.as_matrix(np.ones((2, 3)))


@pytest.mark.parametrize("d", [1, 2, 4, 7])
@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, linalg.INF])
def test_schatten_identity(d, p):
    expected = 1.0 if p == linalg.INF else d ** (1 / p)
    assert linalg.schatten_norm(np.eye(d), p) == pytest.approx(expected, rel=1e-13)


def test_schatten_pauli_spectral():
    assert linalg.schatten_norm(PAULI_Z, linalg.INF) == pytest.approx(1.0)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
def test_schatten_matches_svd(rng, p):
    for _ in range(10):
        m = rand_complex(rng, 4)
        sv = np.linalg.svd(m, compute_uv=False)
        assert linalg.schatten_norm(m, p) == pytest.approx(np.sum(sv**p) ** (1 / p), rel=1e-11)
    assert linalg.schatten_norm(m, 2.0) == pytest.approx(np.linalg.norm(m, "fro"), rel=1e-12)


def test_schatten_non_increasing_in_p(rng):
    for _ in range(100):
        a = rand_complex(rng, 4)
        assert linalg.schatten_norm(a, 3.0) <= linalg.schatten_norm(a, 1.5) + 1e-12


def test_schatten_rejects_p_below_one():
    with pytest.raises(ValueError):
        linalg.schatten_norm(np.eye(2), 0.5)


def test_psd_power_identity():
    np.testing.assert_allclose(linalg.psd_power(np.eye(3), 2.7), np.eye(3), atol=1e-14)


def test_psd_power_sqrt():
    np.testing.assert_allclose(linalg.psd_power(np.diag([4.0, 1.0]), 0.5), np.diag([2.0, 1.0]), atol=1e-14)


@pytest.mark.parametrize("q", [0.0, 0.5, 1.0, 1.7, 3.0])
def test_psd_power_trace_is_eigen_sum(rng, q):
    p = rand_psd(rng, 5)
    lam = np.clip(np.linalg.eigvalsh(p), 0, None)
    assert np.trace(linalg.psd_power(p, q)).real == pytest.approx(np.sum(lam**q), rel=1e-11)


def test_psd_power_composes(rng):
    p = rand_psd(rng, 4)
    half = linalg.psd_power(p, 0.5)
    np.testing.assert_allclose(half @ half, p, atol=1e-11)


def test_psd_power_clamps_roundoff():
    m = np.diag([1.0, -1e-12])
    np.testing.assert_allclose(linalg.psd_power(m, 0.5), np.diag([1.0, 0.0]))


def test_psd_power_rejects_negative():
    with pytest.raises(NotPSDError):
        linalg.psd_power(np.diag([1.0, -1e-3]), 0.5)


def test_psd_inverse_sqrt(rng):
    p = rand_psd(rng, 4) + np.eye(4)
    s = linalg.psd_inverse_sqrt(p)
    np.testing.assert_allclose(s @ p @ s, np.eye(4), atol=1e-11)


def test_spectral_and_trace_norm_hermitian(rng):
    h = rand_hermitian(rng, 5)
    lam = np.linalg.eigvalsh(h)
    assert linalg.spectral_norm(h) == pytest.approx(np.abs(lam).max(), rel=1e-12)
    assert linalg.trace_norm(h) == pytest.approx(np.abs(lam).sum(), rel=1e-12)


def test_is_psd():
    assert linalg.is_psd(np.diag([1.0, 0.0]))
    assert not linalg.is_psd(np.diag([1.0, -0.1]))


def test_transpose_is_plain_transpose(rng):
    m = rand_complex(rng, 3)
    np.testing.assert_array_equal(linalg.transpose(m), m.T)
