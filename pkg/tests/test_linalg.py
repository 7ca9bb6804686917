import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebit_unlock import linalg
from ebit_unlock.errors import DimensionOverflow, NotHermitian, NotPSD, ShapeError

from helpers import PHI_PLUS, random_density, random_unitary


def test_tensor_identity():
    np.testing.assert_array_equal(linalg.tensor_product(np.eye(2), np.eye(2)), np.eye(4))


def test_tensor_diagonal():
    out = linalg.tensor_product(np.diag([1, 0]), np.diag([0.5, 0.5]))
    np.testing.assert_array_equal(out, np.diag([0.5, 0.5, 0, 0]))


def test_tensor_index_convention():
    a = np.arange(6).reshape(2, 3) + 1j
    b = np.arange(4).reshape(4, 1) - 2.0
    out = linalg.tensor_product(a, b)
    assert out.shape == (8, 3)
    for i, j, k, l in np.ndindex(2, 3, 4, 1):
        assert out[i * 4 + k, j * 1 + l] == a[i, j] * b[k, l]


def test_tensor_trace_factorizes():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        # trace of the product written out as a double sum
        direct = sum(a[i, i] * b[k, k] for i in range(2) for k in range(2))
        assert abs(np.trace(linalg.tensor_product(a, b)) - direct) < 1e-12
        assert abs(direct - np.trace(a) * np.trace(b)) < 1e-12


def test_tensor_overflow():
    with pytest.raises(DimensionOverflow, match="dimension overflow"):
        linalg.tensor_product(np.eye(64), np.eye(64), cap=64**2)
    with pytest.raises(DimensionOverflow):
        linalg.tensor_product(np.eye(2048), np.eye(2))


def test_tensor_associative():
    rng = np.random.default_rng(11)
    for _ in range(25):
        a, b, c = (rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3)) for _ in range(3))
        left = linalg.tensor_product(linalg.tensor_product(a, b), c)
        right = linalg.tensor_product(a, linalg.tensor_product(b, c))
        assert np.max(np.abs(left - right)) <= 1e-12


def test_partial_trace_bell():
    rho = np.outer(PHI_PLUS, PHI_PLUS.conj())
    for keep in "AB":
        np.testing.assert_allclose(linalg.partial_trace(rho, 2, 2, keep), np.eye(2) / 2, atol=1e-15)


def test_partial_trace_product():
    rng = np.random.default_rng(0)
    ra, rb = random_density(3, rng), random_density(2, rng)
    rho = np.kron(ra, rb)
    np.testing.assert_allclose(linalg.partial_trace(rho, 3, 2, "A"), ra, atol=1e-14)
    np.testing.assert_allclose(linalg.partial_trace(rho, 3, 2, "B"), rb, atol=1e-14)


def test_partial_trace_matches_schmidt():
    rng = np.random.default_rng(5)
    z = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    psi = z / np.linalg.norm(z)
    reduced = linalg.partial_trace(np.outer(psi, psi.conj()), 3, 2, "A")
    # SVD of the 3x2 coefficient matrix, computed independently
    oracle = np.linalg.svd(psi.reshape(3, 2), compute_uv=False) ** 2
    ev = linalg.hermitian_eigenvalues(reduced)
    np.testing.assert_allclose(ev, np.append(oracle, 0.0), atol=1e-12)
    np.testing.assert_allclose(linalg.schmidt_probs(psi, 3, 2), oracle, atol=1e-12)


def test_partial_trace_shape_error():
    with pytest.raises(ShapeError, match="shape error"):
        linalg.partial_trace(np.eye(6) / 6, 2, 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_partial_trace_preserves_trace(dim_a, dim_b, seed):
    rho = random_density(dim_a * dim_b, np.random.default_rng(seed))
    for keep in "AB":
        assert abs(np.trace(linalg.partial_trace(rho, dim_a, dim_b, keep)) - 1) <= 1e-9


def test_partial_transpose_product_state():
    rng = np.random.default_rng(1)
    ra, rb = random_density(2, rng), random_density(3, rng)
    pt = linalg.partial_transpose(np.kron(ra, rb), 2, 3)
    np.testing.assert_allclose(pt, np.kron(ra, rb.T), atol=1e-15)
    assert linalg.hermitian_eigenvalues(pt)[-1] >= -1e-12


def test_partial_transpose_bell():
    pt = linalg.partial_transpose(np.outer(PHI_PLUS, PHI_PLUS), 2, 2)
    # the partial transpose of |Phi+><Phi+| is SWAP/2, eigenvalues (1/2, 1/2, 1/2, -1/2)
    assert abs(np.linalg.eigvalsh(pt)[0] + 0.5) < 1e-12
    assert abs(np.trace(pt) - 1) < 1e-12


def test_partial_transpose_involution():
    rho = random_density(6, np.random.default_rng(2))
    twice = linalg.partial_transpose(linalg.partial_transpose(rho, 2, 3), 2, 3)
    assert np.max(np.abs(twice - rho)) <= 1e-12


def test_hermitian_eigenvalues_examples():
    np.testing.assert_allclose(linalg.hermitian_eigenvalues(np.eye(3)), [1, 1, 1])
    np.testing.assert_allclose(linalg.hermitian_eigenvalues([[0, 1], [1, 0]]), [1, -1])


def test_hermitian_eigenvalues_unitary_invariance():
    rng = np.random.default_rng(9)
    for _ in range(20):
        u = random_unitary(2, rng)
        m = u @ np.diag([0.7, 0.3]) @ u.conj().T
        np.testing.assert_allclose(linalg.hermitian_eigenvalues(m), [0.7, 0.3], atol=1e-12)
    for n in (3, 5):
        m = random_density(n, rng)
        u = random_unitary(n, rng)
        a = linalg.hermitian_eigenvalues(m)
        b = linalg.hermitian_eigenvalues(u @ m @ u.conj().T)
        assert np.max(np.abs(a - b)) <= 1e-8


def test_hermitian_eigenvalues_rejects():
    with pytest.raises(NotHermitian, match="not Hermitian"):
        linalg.hermitian_eigenvalues([[0, 1], [0, 0]])


def test_clamp_spectrum():
    np.testing.assert_array_equal(linalg.clamp_spectrum([0.5, -5e-10]), [0.5, 0.0])
    with pytest.raises(NotPSD):
        linalg.clamp_spectrum([1.1, -0.1])


def test_schmidt_examples():
    np.testing.assert_allclose(linalg.schmidt_probs([1, 0, 0, 0], 2, 2), [1, 0], atol=1e-15)
    np.testing.assert_allclose(linalg.schmidt_probs(PHI_PLUS, 2, 2), [0.5, 0.5], atol=1e-15)
    skewed = [np.sqrt(0.9), 0, 0, np.sqrt(0.1)]
    np.testing.assert_allclose(linalg.schmidt_probs(skewed, 2, 2), [0.9, 0.1], atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_reduced_spectra_equal_schmidt(dim_a, dim_b, seed):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(dim_a * dim_b) + 1j * rng.standard_normal(dim_a * dim_b)
    psi = z / np.linalg.norm(z)
    probs = linalg.schmidt_probs(psi, dim_a, dim_b)
    assert abs(probs.sum() - 1) <= 1e-9
    rho = linalg.projector(psi)
    for keep, d in (("A", dim_a), ("B", dim_b)):
        ev = linalg.hermitian_eigenvalues(linalg.partial_trace(rho, dim_a, dim_b, keep))
        padded = np.zeros(max(d, len(probs)))
        padded[: len(probs)] = probs
        ev_padded = np.zeros_like(padded)
        ev_padded[:d] = ev
        assert np.max(np.abs(ev_padded - padded)) <= 1e-8


def test_check_density_matrix():
    linalg.check_density_matrix(np.eye(2) / 2)
    with pytest.raises(ShapeError):
        linalg.check_density_matrix(np.eye(2))
    with pytest.raises(NotPSD):
        linalg.check_density_matrix(np.diag([1.5, -0.5]))


def test_regroup_two_copies():
    # |a1 b1> ⊗ |a2 b2>  ->  |a1 a2 b1 b2>
    da, db = 2, 3
    for a1, b1, a2, b2 in np.ndindex(da, db, da, db):
        v = np.zeros(da * db)
        w = np.zeros(da * db)
        v[a1 * db + b1] = 1
        w[a2 * db + b2] = 1
        out = linalg.regroup_vector(np.kron(v, w), da, db, 2)
        target = ((a1 * da + a2) * db + b1) * db + b2
        assert out[target] == 1 and out.sum() == 1


def test_regroup_operator_matches_vector():
    rng = np.random.default_rng(4)
    z = rng.standard_normal(36) + 1j * rng.standard_normal(36)
    op = np.outer(z, z.conj())
    out = linalg.regroup_operator(op, 2, 3, 2)
    v = linalg.regroup_vector(z, 2, 3, 2)
    np.testing.assert_allclose(out, np.outer(v, v.conj()), atol=1e-14)
