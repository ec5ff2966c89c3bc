"""Connected sums of two short algebras glued along distinguished quadrics.

From presentations (P1, f) and (P2, g) the glued ring R keeps every
non-distinguished quadric of both sides, kills every cross product of an
x-side variable with a y-side variable, and identifies f with g through
the single relation f - g.  The distinguished quadrics themselves are NOT
relations of R: their common image delta spans the degree-2 intersection
of the two variable ideals and sits in the socle.

The glue quadric f - g is always the last entry of the built presentation,
which is what an iterated construction wants as its next distinguished
quadric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Element, ShortAlgebra, verify_truncation
from .complexes import (
    ComplexError,
    LinearMatrix,
    PeriodicComplex,
    block_diag,
    compose,
    condition8_check,
    exactness_at,
    is_complex,
    product_f_coefficient,
)
from .presentation import InvalidPresentation, Presentation


class InvariantViolation(AssertionError):
    """A mathematically guaranteed consistency check failed (internal error)."""


class AssembleError(ComplexError):
    """Inputs to assemble do not satisfy the normalized-composite contract."""

    def __init__(self, message: str, side: str | None = None, position: int | None = None,
                 coefficient=None):
        super().__init__(message)
        self.side = side
        self.position = position
        self.coefficient = coefficient


@dataclass(eq=False)
class ConnectedSum:
    """The five algebras of a glued pair plus the gluing data.

    partition holds the R-coordinate indices of the x-side and y-side
    variables; f and g live over R0 and S0 respectively, delta over R.
    """

    R: ShortAlgebra
    R0: ShortAlgebra
    R1: ShortAlgebra
    S0: ShortAlgebra
    S1: ShortAlgebra
    partition: tuple[tuple[int, ...], tuple[int, ...]]
    f: Element
    g: Element
    delta: Element

    @property
    def a_indices(self) -> tuple[int, ...]:
        return self.partition[0]

    @property
    def b_indices(self) -> tuple[int, ...]:
        return self.partition[1]

    def glue_index(self) -> int:
        """Index of the f - g quadric in R's presentation (always last)."""
        return len(self.R.presentation.quadrics) - 1


def _shift_quadric(quad: dict, offset: int) -> dict:
    return {(i + offset, j + offset): c for (i, j), c in quad.items()}


def build_connected_sum(p1: Presentation, p2: Presentation) -> ConnectedSum:
    """Glue (P1, f) and (P2, g) into the connected-sum algebra bundle.

    Both presentations must carry a distinguished quadric and share no
    variable names.  The truncated models of R, R0, R1, S0, S1 are
    certified faithful: the full presentations P1, P2 certify both their
    quotient and the quotient that keeps the distinguished quadric alive
    (whose extra cubic generators are invisible degree-wise).
    """
    p1.validate()
    p2.validate()
    if p1.prime != p2.prime:
        raise InvalidPresentation("presentations live over different primes")
    if p1.distinguished is None or p2.distinguished is None:
        raise InvalidPresentation("both presentations need a distinguished quadric")
    common = set(p1.variables) & set(p2.variables)
    if common:
        raise InvalidPresentation(f"variable name collision: {sorted(common)}")

    n1, n2 = p1.n, p2.n
    variables = p1.variables + p2.variables
    f_table = p1.distinguished_quadric()
    g_table = p2.distinguished_quadric()

    quadrics: list[dict] = []
    quadrics.extend(q for k, q in enumerate(p1.quadrics) if k != p1.distinguished)
    quadrics.extend(
        _shift_quadric(q, n1) for k, q in enumerate(p2.quadrics) if k != p2.distinguished
    )
    for i in range(n1):
        for j in range(n2):
            quadrics.append({(i, n1 + j): 1})
    glue = dict(f_table)
    for (i, j), c in _shift_quadric(g_table, n1).items():
        glue[(i, j)] = (glue.get((i, j), 0) - c) % p1.prime
    glue = {k: c for k, c in glue.items() if c}
    quadrics.append(glue)

    r_pres = Presentation(variables, tuple(quadrics), None, p1.prime)
    r_pres.validate()

    if not verify_truncation(p1):
        raise InvalidPresentation("truncation certificate fails for the first factor")
    if not verify_truncation(p2):
        raise InvalidPresentation("truncation certificate fails for the second factor")
    if not verify_truncation(r_pres):
        raise InvalidPresentation("truncation certificate fails for the glued ring")

    R = ShortAlgebra(r_pres)
    R1 = ShortAlgebra(p1)
    R0 = ShortAlgebra(p1.without_distinguished())
    S1 = ShortAlgebra(p2)
    S0 = ShortAlgebra(p2.without_distinguished())

    f = R0.quadric_element(f_table)
    g = S0.quadric_element(g_table)
    delta = R.quadric_element(f_table)
    delta_from_g = R.quadric_element(_shift_quadric(g_table, n1))
    if delta.is_zero():
        raise InvalidPresentation("glued image of the distinguished quadric is zero")
    if delta != delta_from_g:
        raise InvariantViolation("images of f and g in the glued ring differ")

    cs = ConnectedSum(
        R=R,
        R0=R0,
        R1=R1,
        S0=S0,
        S1=S1,
        partition=(tuple(range(n1)), tuple(range(n1, n1 + n2))),
        f=f,
        g=g,
        delta=delta,
    )
    _check_invariants(cs)
    return cs


def _check_invariants(cs: ConnectedSum):
    R = cs.R
    a_idx, b_idx = cs.partition
    for i in a_idx:
        for j in b_idx:
            if R.tensor[i, j].any():
                raise InvariantViolation(f"cross product x_{i} * y_{j} is nonzero in R")
    if R.n != cs.R0.n + cs.S0.n:
        raise InvariantViolation("degree-1 dimension of R is not the sum of the factors")
    if R.d != cs.R0.d + cs.S0.d - 1:
        raise InvariantViolation("degree-2 dimension of R is not dim R0_2 + dim S0_2 - 1")
    # delta * (every variable) lands in degree 3; the truncation certificate on
    # R's presentation is what makes that honest zero, so socle membership of
    # delta needs no further computation here.


# ---------------------------------------------------------------------------
# splitting and assembling matrices
# ---------------------------------------------------------------------------

def split_matrix(cs: ConnectedSum, d: LinearMatrix) -> tuple[LinearMatrix, LinearMatrix]:
    """Split entries over R by the variable partition into (A over R1, B over S1)."""
    if d.algebra is not cs.R and d.algebra.presentation != cs.R.presentation:
        raise ComplexError("matrix does not live over the glued ring")
    a_idx = list(cs.a_indices)
    b_idx = list(cs.b_indices)
    a = LinearMatrix(cs.R1, d.entries[:, :, a_idx])
    b = LinearMatrix(cs.S1, d.entries[:, :, b_idx])
    return a, b


def split_complex(cs: ConnectedSum, c: PeriodicComplex) -> tuple[PeriodicComplex, PeriodicComplex]:
    parts = [split_matrix(cs, m) for m in c.maps]
    return (
        PeriodicComplex(tuple(p[0] for p in parts)),
        PeriodicComplex(tuple(p[1] for p in parts)),
    )


def embed_a(cs: ConnectedSum, m: LinearMatrix) -> LinearMatrix:
    out = np.zeros((m.rows, m.cols, cs.R.n), dtype=np.int64)
    out[:, :, list(cs.a_indices)] = m.entries
    return LinearMatrix(cs.R, out)


def embed_b(cs: ConnectedSum, m: LinearMatrix) -> LinearMatrix:
    out = np.zeros((m.rows, m.cols, cs.R.n), dtype=np.int64)
    out[:, :, list(cs.b_indices)] = m.entries
    return LinearMatrix(cs.R, out)


def alternating_signs(period: int) -> list[int]:
    return [1 if k % 2 == 0 else -1 for k in range(period)]


def combine_sides(
    cs: ConnectedSum,
    a_side: PeriodicComplex,
    b_side: PeriodicComplex,
    b_signs: list[int] | None = None,
) -> PeriodicComplex:
    """Splice two factor complexes into d_i = A'_i + s_i B'_i over R.

    No normalization is required or checked here; use `assemble` for the
    contract that guarantees a complex.
    """
    if a_side.period != b_side.period:
        raise ComplexError("factor complexes have different periods")
    signs = b_signs if b_signs is not None else [1] * a_side.period
    maps = []
    for k in range(a_side.period):
        ma, mb = a_side.maps[k], b_side.maps[k]
        if (ma.rows, ma.cols) != (mb.rows, mb.cols):
            raise ComplexError(
                f"rank mismatch at map {k}: {ma.rows}x{ma.cols} vs {mb.rows}x{mb.cols}; "
                "pad with direct_sum_copies first"
            )
        combined = (embed_a(cs, ma).entries + signs[k] * embed_b(cs, mb).entries) % cs.R.p
        maps.append(LinearMatrix(cs.R, combined))
    return PeriodicComplex(tuple(maps))


def assemble(
    cs: ConnectedSum,
    a_side: PeriodicComplex,
    b_side: PeriodicComplex,
    auto_sign: bool = True,
) -> PeriodicComplex:
    """Assemble normalized factor complexes into a complex over R.

    Requires equal periods and ranks (pad with `direct_sum_copies`), lifted
    x-side composites equal to f*I and lifted, sign-adjusted y-side
    composites equal to -g*I.  With auto_sign the y-side maps are first
    multiplied by alternating signs +, -, +, ...; this is what makes a pair
    of plain period-2 complexes with composites f*I and g*I splice into a
    complex.  Total acyclicity is NOT asserted: verify it separately.
    """
    if a_side.period != b_side.period:
        raise AssembleError("factor complexes have different periods")
    q = a_side.period
    signs = alternating_signs(q) if auto_sign else [1] * q

    lifted_a = [m.over(cs.R0) for m in a_side.maps]
    signed_b = [b_side.maps[k].scale(signs[k]) for k in range(q)]
    lifted_b = [m.over(cs.S0) for m in signed_b]

    for k in range(q):
        u = product_f_coefficient(lifted_a[k], lifted_a[(k + 1) % q], cs.f)
        ident = cs.R0.field.eye(lifted_a[k].rows)
        if u is None or not np.array_equal(u, ident):
            raise AssembleError(
                f"x-side composite at position {k} is not f times the identity",
                side="a", position=k, coefficient=u,
            )
    for k in range(q):
        u = product_f_coefficient(lifted_b[k], lifted_b[(k + 1) % q], cs.g)
        neg_ident = (-cs.S0.field.eye(lifted_b[k].rows)) % cs.S0.p
        if u is None or not np.array_equal(u, neg_ident):
            raise AssembleError(
                f"y-side composite at position {k} is not -g times the identity"
                + ("" if auto_sign else " (auto_sign is off)"),
                side="b", position=k, coefficient=u,
            )

    combined = combine_sides(cs, a_side, PeriodicComplex(tuple(signed_b)), None)
    if not is_complex(combined):
        raise InvariantViolation("normalized sides did not splice into a complex")
    return combined


def direct_sum_copies(c: PeriodicComplex, copies: int) -> PeriodicComplex:
    """Replace each map by a block-diagonal direct sum of `copies` copies."""
    if copies < 1:
        raise ComplexError("copies must be at least 1")
    return PeriodicComplex(tuple(block_diag([m] * copies) for m in c.maps))


# ---------------------------------------------------------------------------
# cross-checks against the structure theory
# ---------------------------------------------------------------------------

def gorenstein_crosscheck(cs: ConnectedSum) -> dict:
    """Gorenstein flags for R, R0, S0; R must agree with (R0 and S0)."""
    record = {
        "gor_R": cs.R.is_gorenstein(),
        "gor_R0": cs.R0.is_gorenstein(),
        "gor_S0": cs.S0.is_gorenstein(),
    }
    record["consistent"] = record["gor_R"] == (record["gor_R0"] and record["gor_S0"])
    if not record["consistent"]:
        raise InvariantViolation(f"Gorenstein crosscheck failed: {record}")
    return record


def mainresult_crosscheck(
    cs: ConnectedSum,
    a_side: PeriodicComplex,
    b_side: PeriodicComplex,
    auto_sign: bool = True,
) -> dict:
    """Exactness of the spliced complex against exactness of its factors.

    When the lifting condition holds on both sides, the equivalence
    (spliced exact <=> both factors exact) is asserted; when it fails the
    verdicts are recorded as a hypothesis-violated example.
    """
    cond_a = condition8_check(a_side, cs.R0, cs.f)
    cond_b = condition8_check(b_side, cs.S0, cs.g)
    hypothesis = cond_a and cond_b

    signs = alternating_signs(a_side.period) if auto_sign else None
    spliced = combine_sides(cs, a_side, b_side, signs)
    spliced_is_complex = is_complex(spliced)

    a_exact = all(exactness_at(a_side, i) for i in a_side.positions())
    b_exact = all(exactness_at(b_side, i) for i in b_side.positions())
    spliced_exact = (
        all(exactness_at(spliced, i) for i in spliced.positions())
        if spliced_is_complex
        else False
    )

    record = {
        "condition8_a": cond_a,
        "condition8_b": cond_b,
        "hypothesis_ok": hypothesis,
        "factors_exact": {"a": a_exact, "b": b_exact},
        "assembled_is_complex": spliced_is_complex,
        "assembled_exact": spliced_exact,
        "biconditional_holds": spliced_exact == (a_exact and b_exact),
        "status": "ok" if hypothesis else "hypothesis-violated",
    }
    if hypothesis and spliced_is_complex and not record["biconditional_holds"]:
        raise InvariantViolation(f"factor/assembled exactness equivalence failed: {record}")
    return record
