import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tacx.linalg import DEFAULT_PRIME, FieldError, PrimeField

F5 = PrimeField(5)


def test_field_configuration():
    assert PrimeField().p == DEFAULT_PRIME
    with pytest.raises(FieldError, match="sign-sensitive"):
        PrimeField(2)
    with pytest.raises(FieldError):
        PrimeField(9)
    with pytest.raises(FieldError):
        PrimeField(1)


def test_scalar_inverses():
    f = PrimeField(32003)
    for a in (1, 2, 17, 32002):
        assert f.mul(a, f.inv(a)) == 1
    with pytest.raises(ZeroDivisionError):
        f.inv(0)


def test_rref_identity():
    r, piv = F5.rref(F5.eye(2))
    assert np.array_equal(r, F5.eye(2))
    assert piv == [0, 1]


def test_rref_zero():
    m = F5.zeros(3, 2)
    r, piv = F5.rref(m)
    assert np.array_equal(r, m)
    assert piv == []


def test_rref_rank_one():
    m = F5.array([[1, 2], [2, 4]])
    r, piv = F5.rref(m)
    assert np.array_equal(r, F5.array([[1, 2], [0, 0]]))
    assert piv == [0]
    assert F5.rank(m) == 1


def test_rank_examples():
    assert F5.rank(F5.eye(4)) == 4
    assert F5.rank(F5.zeros(3, 5)) == 0


def test_kernel_identity_and_zero():
    assert F5.kernel_basis(F5.eye(3)).shape == (3, 0)
    assert np.array_equal(F5.kernel_basis(F5.zeros(4, 3)), F5.eye(3))


def test_kernel_rank_one():
    k = F5.kernel_basis(F5.array([[1, 2], [2, 4]]))
    assert k.shape == (2, 1)
    # proportional to (-2, 1)
    assert np.array_equal(k[:, 0], F5.array([-2, 1]))


def test_membership_examples():
    v = F5.array([3, 1, 4])
    assert np.array_equal(F5.membership(F5.eye(3), v), v)
    assert F5.membership(F5.zeros(2, 3), F5.array([1, 0])) is None
    x = F5.membership(F5.array([[1], [2]]), F5.array([2, 4]))
    assert np.array_equal(x, F5.array([2]))


def test_membership_shape_check():
    with pytest.raises(ValueError):
        F5.membership(F5.eye(2), F5.array([1, 2, 3]))


def test_invert_examples():
    assert np.array_equal(F5.invert(F5.eye(3)), F5.eye(3))
    swap = F5.array([[0, 1], [1, 0]])
    assert np.array_equal(F5.invert(swap), swap)
    assert np.array_equal(F5.invert(F5.array([[1, 1], [0, 1]])), F5.array([[1, 4], [0, 1]]))
    assert F5.invert(F5.array([[1, 2], [2, 4]])) is None
    with pytest.raises(ValueError):
        F5.invert(F5.zeros(2, 3))


small_matrix = st.tuples(
    st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1)
)


def _random_matrix(rows, cols, seed, p=5):
    rng = np.random.default_rng(seed)
    return rng.integers(0, p, size=(rows, cols), dtype=np.int64)


@settings(max_examples=60, deadline=None)
@given(small_matrix)
def test_rank_transpose_invariant(shape):
    rows, cols, seed = shape
    m = _random_matrix(rows, cols, seed)
    assert F5.rank(m) == F5.rank(m.T)


@settings(max_examples=60, deadline=None)
@given(small_matrix)
def test_rank_nullity(shape):
    rows, cols, seed = shape
    m = _random_matrix(rows, cols, seed)
    assert F5.rank(m) + F5.kernel_basis(m).shape[1] == cols


@settings(max_examples=60, deadline=None)
@given(small_matrix)
def test_membership_of_image(shape):
    rows, cols, seed = shape
    m = _random_matrix(rows, cols, seed)
    x = _random_matrix(cols, 1, seed ^ 0xABCDEF)[:, 0]
    v = (m @ x) % 5
    sol = F5.membership(m, v)
    assert sol is not None
    assert np.array_equal((m @ sol) % 5, v)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_invert_iff_full_rank(size, seed):
    m = _random_matrix(size, size, seed)
    inv = F5.invert(m)
    if F5.rank(m) == size:
        assert inv is not None
        assert np.array_equal(F5.matmul(m, inv), F5.eye(size))
        assert np.array_equal(F5.matmul(inv, m), F5.eye(size))
    else:
        assert inv is None


def test_kernel_vectors_annihilate():
    rng = np.random.default_rng(11)
    for _ in range(20):
        m = rng.integers(0, 5, size=(3, 5), dtype=np.int64)
        k = F5.kernel_basis(m)
        assert not ((m @ k) % 5).any()
