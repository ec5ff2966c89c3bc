import numpy as np
import pytest

from tacx.algebra import ShortAlgebra, derive_r0
from tacx.cli import fixtures_dir
from tacx.complexes import LinearMatrix, PeriodicComplex
from tacx.csum import build_connected_sum
from tacx.presentation import Presentation, load_ring, monomial_pairs


FIXTURES = fixtures_dir()


def fixture_path(name):
    return FIXTURES / name


@pytest.fixture(scope="session")
def exnew_pair():
    return load_ring(FIXTURES / "exnew_r1.ring"), load_ring(FIXTURES / "exnew_s1.ring")


@pytest.fixture(scope="session")
def exnew_cs(exnew_pair):
    return build_connected_sum(*exnew_pair)


@pytest.fixture(scope="session")
def ex1_pair():
    return load_ring(FIXTURES / "ex1_r1.ring"), load_ring(FIXTURES / "ex1_s1.ring")


@pytest.fixture(scope="session")
def ex1_cs(ex1_pair):
    return build_connected_sum(*ex1_pair)


@pytest.fixture(scope="session")
def ex1_r(ex1_cs):
    return ex1_cs.R


@pytest.fixture(scope="session")
def exnew_r(exnew_cs):
    return exnew_cs.R


def rank_one_complex(algebra, a_expr, b_expr):
    a = algebra.element_from_expr(a_expr)
    b = algebra.element_from_expr(b_expr)
    return PeriodicComplex(
        (
            LinearMatrix(algebra, a.v1.reshape(1, 1, -1)),
            LinearMatrix(algebra, b.v1.reshape(1, 1, -1)),
        )
    )


def random_presentation(rng, max_vars=4, prime=5):
    """A random valid presentation: nonzero quadric rows over a small field."""
    n = int(rng.integers(1, max_vars + 1))
    pairs = monomial_pairs(n)
    num = int(rng.integers(0, len(pairs) + 1))
    quadrics = []
    for _ in range(num):
        row = rng.integers(0, prime, size=len(pairs))
        if not row.any():
            row[rng.integers(0, len(pairs))] = 1
        quadrics.append({pairs[k]: int(c) for k, c in enumerate(row) if c})
    return Presentation(tuple(f"v{i}" for i in range(n)), tuple(quadrics), None, prime)


def random_complex_pair(rng, algebra, b=2):
    """A random period-2 complex: m1 solves both composite-zero conditions."""
    n = algebra.n
    fld = algebra.field
    m0 = LinearMatrix(algebra, rng.integers(0, algebra.p, size=(b, b, n), dtype=np.int64))
    # unknowns: entries of m1 as a (b*b*n) vector; constraints: compose(m0, m1) = 0
    # and compose(m1, m0) = 0, each (b*b*d) linear conditions
    rows = []
    for i in range(b):
        for k in range(b):
            # sum_j bilinear(m0[i,j], m1[j,k]) = 0: coefficient of m1[j,k,m]
            block = np.zeros((algebra.d, b, b, n), dtype=np.int64)
            for j in range(b):
                block[:, j, k, :] += algebra.multiplication_map(m0.entries[i, j])
            rows.append(block.reshape(algebra.d, b * b * n))
    for i in range(b):
        for k in range(b):
            block = np.zeros((algebra.d, b, b, n), dtype=np.int64)
            for j in range(b):
                # bilinear(m1[i,j], m0[j,k]): linear in m1[i,j]
                block[:, i, j, :] += algebra.multiplication_map(m0.entries[j, k])
            rows.append(block.reshape(algebra.d, b * b * n))
    system = np.concatenate(rows, axis=0) % algebra.p
    basis = fld.kernel_basis(system)
    if basis.shape[1] == 0:
        m1 = LinearMatrix(algebra, np.zeros((b, b, n), dtype=np.int64))
    else:
        coeffs = rng.integers(0, algebra.p, size=basis.shape[1])
        vec = (basis @ coeffs) % algebra.p
        m1 = LinearMatrix(algebra, vec.reshape(b, b, n))
    return PeriodicComplex((m0, m1))
