import numpy as np
import pytest

from conftest import FIXTURES
from tacx.algebra import ShortAlgebra, derive_r0
from tacx.complexes import (
    LinearMatrix,
    PeriodicComplex,
    is_totally_acyclic,
    matrix_from_elements,
    product_f_coefficient,
)
from tacx.doubling import (
    DoubledPair,
    DoublingError,
    NormalFormUnsupported,
    SocleDecomposition,
    build_doubled,
    decomposition_from_quadric,
    normal_form,
    search_alpha,
    verify_doubled,
)
from tacx.presentation import load_ring


@pytest.fixture(scope="module")
def exnew_setup():
    p = load_ring(FIXTURES / "exnew_r1.ring")
    r1 = ShortAlgebra(p)
    r0 = derive_r0(p)
    return r1, r0, r0.quadric_element(p.distinguished_quadric())


@pytest.fixture(scope="module")
def ex1_setup():
    p = load_ring(FIXTURES / "ex1_r1.ring")
    r1 = ShortAlgebra(p)
    r0 = derive_r0(p)
    return r1, r0, r0.quadric_element(p.distinguished_quadric())


@pytest.fixture(scope="module")
def ex1_s_setup():
    p = load_ring(FIXTURES / "ex1_s1.ring")
    s1 = ShortAlgebra(p)
    s0 = derive_r0(p)
    return s1, s0, s0.quadric_element(p.distinguished_quadric())


def one_by_one(alg, expr):
    e = alg.element_from_expr(expr)
    return LinearMatrix(alg, e.v1.reshape(1, 1, -1))


def const_times(alg, c, expr):
    e = alg.scale(c, alg.element_from_expr(expr))
    return LinearMatrix(alg, e.v1.reshape(1, 1, -1))


# ---------------------------------------------------------------------------
# socle decompositions
# ---------------------------------------------------------------------------

def test_decomposition_validation(ex1_setup):
    _, r0, f = ex1_setup
    dec = SocleDecomposition(((r0.variable(0), r0.variable(2)),))
    dec.validate(r0, f)
    with pytest.raises(DoublingError, match="sum"):
        SocleDecomposition(((r0.variable(0), r0.variable(3)),)).validate(r0, f)
    with pytest.raises(DoublingError, match="linear"):
        SocleDecomposition(((f, r0.variable(0)),)).validate(r0, f)


def test_decomposition_from_quadric(exnew_setup):
    _, r0, f = exnew_setup
    dec = decomposition_from_quadric(r0, {(2, 2): 1})
    assert len(dec) == 1
    dec.validate(r0, f)


def test_two_step_decomposition(exnew_setup):
    # z1^2 = (z1 - x1) z1 + x1 z1: a valid two-pair decomposition
    _, r0, f = exnew_setup
    dec = SocleDecomposition(
        (
            (r0.element_from_expr("z1 - x1"), r0.variable(2)),
            (r0.variable(0), r0.variable(2)),
        )
    )
    dec.validate(r0, f)
    assert len(dec) == 2


# ---------------------------------------------------------------------------
# normal form
# ---------------------------------------------------------------------------

def test_normal_form_no_zero_block(exnew_setup):
    _, r0, f = exnew_setup
    z = one_by_one(r0, "z1")
    x, w, v = normal_form(z, z, f)
    assert v == 0
    assert x == z and w == z


def test_normal_form_all_zero_block(ex1_setup):
    _, r0, f = ex1_setup
    l1 = one_by_one(r0, "x1+x2+y1+y2+y3")
    l1p = one_by_one(r0, "x1+x2-y1-y2-y3")
    x, w, v = normal_form(l1, l1p, f)
    assert v == 1
    assert x == l1 and w == l1p


def test_normal_form_rescales_scalar(exnew_setup):
    _, r0, f = exnew_setup
    z = one_by_one(r0, "z1")
    z2 = const_times(r0, 2, "z1")
    x, w, v = normal_form(z, z2, f)
    assert v == 0
    m = product_f_coefficient(x, w, f)
    assert np.array_equal(m, np.array([[1]]))


def test_normal_form_splits_idempotent(exnew_setup):
    _, r0, f = exnew_setup
    x = matrix_from_elements(r0, [[r0.variable(2), r0.zero()], [r0.zero(), r0.variable(0)]])
    w = matrix_from_elements(r0, [[r0.variable(2), r0.zero()], [r0.zero(), r0.variable(1)]])
    xo, wo, v = normal_form(x, w, f)
    assert v == 1
    m = product_f_coefficient(xo, wo, f)
    # zero block leads: diag(0, 1)
    assert np.array_equal(m, np.diag([0, 1]).astype(np.int64))


def test_normal_form_noncommuting_rejected(exnew_setup):
    _, r0, f = exnew_setup
    a = np.array([[1, 1], [0, 1]], dtype=np.int64)
    b = np.array([[1, 0], [1, 1]], dtype=np.int64)
    z = r0.variable(2).v1
    x = LinearMatrix(r0, np.einsum("ij,n->ijn", a, z))
    w = LinearMatrix(r0, np.einsum("ij,n->ijn", b, z))
    with pytest.raises(DoublingError, match="commute"):
        normal_form(x, w, f)


def test_normal_form_unsupported_pattern(exnew_setup):
    _, r0, f = exnew_setup
    m = np.array([[1, 1], [0, 1]], dtype=np.int64)  # unipotent, not 0/lambda split
    z = r0.variable(2).v1
    x = LinearMatrix(r0, np.einsum("ij,n->ijn", m, z))
    w = LinearMatrix(r0, np.einsum("ij,n->ijn", np.eye(2, dtype=np.int64), z))
    with pytest.raises(NormalFormUnsupported) as exc:
        normal_form(x, w, f)
    assert np.array_equal(exc.value.coefficient, m)


# ---------------------------------------------------------------------------
# the recursion
# ---------------------------------------------------------------------------

def test_build_doubled_reproduces_displayed_matrices(ex1_setup):
    r1, r0, f = ex1_setup
    x = one_by_one(r1, "x1+x2+y1+y2+y3")
    w = one_by_one(r1, "x1+x2-y1-y2-y3")
    dec = SocleDecomposition(((r0.variable(0), r0.variable(2)),))
    pair = build_doubled(r0, x, w, f, dec, alpha=1)
    assert pair.v == 1 and pair.size == 2

    def texts(m):
        return [[r0.element_text(m.entry(i, j)) for j in range(m.cols)] for i in range(m.rows)]

    assert texts(pair.a_tilde) == [
        ["x1 + x2 + y1 + y2 + y3", "x1"],
        ["-y1", "x1 + x2 - y1 - y2 - y3"],
    ]
    assert texts(pair.b_tilde) == [
        ["x1 + x2 - y1 - y2 - y3", "-x1"],
        ["y1", "x1 + x2 + y1 + y2 + y3"],
    ]


def test_build_doubled_v0_short_circuit(exnew_setup):
    _, r0, f = exnew_setup
    z = one_by_one(r0, "z1")
    pair = build_doubled(r0, z, z, f, decomposition_from_quadric(r0, {(2, 2): 1}), alpha=1)
    assert pair.v == 0 and pair.levels == 0 and pair.size == 1
    assert pair.a_tilde == z and pair.b_tilde == z


def test_build_doubled_alpha_zero_degenerates(ex1_setup):
    r1, r0, f = ex1_setup
    x = one_by_one(r1, "x1+x2+y1+y2+y3")
    w = one_by_one(r1, "x1+x2-y1-y2-y3")
    dec = SocleDecomposition(((r0.variable(0), r0.variable(2)),))
    pair = build_doubled(r0, x, w, f, dec, alpha=0)
    rec = verify_doubled(r1, r0, f, pair)
    assert not rec["composite_pattern"]
    assert rec["complex_over_r1"]


def test_verify_doubled_ex1_all_true(ex1_setup):
    r1, r0, f = ex1_setup
    x = one_by_one(r1, "x1+x2+y1+y2+y3")
    w = one_by_one(r1, "x1+x2-y1-y2-y3")
    dec = SocleDecomposition(((r0.variable(0), r0.variable(2)),))
    pair = build_doubled(r0, x, w, f, dec, alpha=1)
    rec = verify_doubled(r1, r0, f, pair)
    assert rec == {
        "composite_pattern": True,
        "complex_over_r1": True,
        "totally_acyclic": True,
        "condition8": True,
    }


def test_verify_doubled_s_side(ex1_s_setup):
    s1, s0, g = ex1_s_setup
    x = one_by_one(s1, "x3+x4+x5+y4+y5")
    w = one_by_one(s1, "x3+x4+x5-y4-y5")
    dec = SocleDecomposition(((s0.variable(1), s0.variable(3)),))  # (x4, y4)
    pair = build_doubled(s0, x, w, g, dec, alpha=1)
    rec = verify_doubled(s1, s0, g, pair)
    assert all(rec.values())
    m = product_f_coefficient(pair.a_tilde, pair.b_tilde, g)
    assert np.array_equal(m, np.eye(2, dtype=np.int64))


def test_mixed_zero_block_instance(exnew_setup):
    # composite diag(f, 0): the zero block is strictly inside, and the claimed
    # block-diagonal composite shape still verifies at every level
    r1, r0, f = exnew_setup
    x = matrix_from_elements(r0, [[r0.variable(2), r0.zero()], [r0.zero(), r0.variable(0)]])
    w = matrix_from_elements(r0, [[r0.variable(2), r0.zero()], [r0.zero(), r0.variable(1)]])
    dec = decomposition_from_quadric(r0, {(2, 2): 1})
    pair = build_doubled(r0, x, w, f, dec, alpha=1)
    assert pair.v == 1 and pair.base_rank == 2 and pair.size == 4
    rec = verify_doubled(r1, r0, f, pair)
    assert all(rec.values())


def test_two_level_recursion_sizes(ex1_setup):
    r1, r0, f = ex1_setup
    x = one_by_one(r1, "x1+x2+y1+y2+y3")
    w = one_by_one(r1, "x1+x2-y1-y2-y3")
    # f = x1*y1 = x1*(y1 - x2) + x1*x2
    dec = SocleDecomposition(
        (
            (r0.variable(0), r0.element_from_expr("y1 - x2")),
            (r0.variable(0), r0.variable(1)),
        )
    )
    dec.validate(r0, f)
    pair = build_doubled(r0, x, w, f, dec, alpha=1)
    assert pair.size == 4 and pair.levels == 2
    rec = verify_doubled(r1, r0, f, pair)
    assert rec["composite_pattern"]


def test_search_alpha(ex1_setup, ex1_s_setup):
    r1, r0, f = ex1_setup
    x = one_by_one(r1, "x1+x2+y1+y2+y3")
    w = one_by_one(r1, "x1+x2-y1-y2-y3")
    dec = SocleDecomposition(((r0.variable(0), r0.variable(2)),))
    alpha, pair = search_alpha(r1, r0, f, x, w, dec)
    assert alpha == 1 and pair.size == 2

    s1, s0, g = ex1_s_setup
    xs = one_by_one(s1, "x3+x4+x5+y4+y5")
    ws = one_by_one(s1, "x3+x4+x5-y4-y5")
    sdec = SocleDecomposition(((s0.variable(1), s0.variable(3)),))
    alpha_s, _ = search_alpha(s1, s0, g, xs, ws, sdec)
    assert alpha_s == 1


def test_doubled_sizes_double_per_level(ex1_setup):
    r1, r0, f = ex1_setup
    x = one_by_one(r1, "x1+x2+y1+y2+y3")
    w = one_by_one(r1, "x1+x2-y1-y2-y3")
    for k in (1, 2, 3):
        parts = [(r0.variable(0), r0.element_from_expr("y1 " + "- x2" * (k - 1)))]
        for _ in range(k - 1):
            parts.append((r0.variable(0), r0.variable(1)))
        dec = SocleDecomposition(tuple(parts))
        dec.validate(r0, f)
        pair = build_doubled(r0, x, w, f, dec, alpha=1)
        assert pair.size == 2**k
