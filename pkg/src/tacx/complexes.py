"""Matrices with degree-1 entries and verification of the complexes they form.

Conventions.  A window holds maps [m_0, ..., m_{L-1}] with m_j mapping
module_{j+1} -> module_j, so cols(m_j) == rows(m_{j+1}).  A periodic complex
applies its maps cyclically with the same orientation; position j of either
kind has outgoing map m_{j-1} and incoming map m_j.

Every exactness question reduces to ranks of the induced k-linear maps
(degree-1)^b -> (degree-2)^c, plus k-linear independence of columns in
degree 0 and surjectivity in degree 2.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

import numpy as np

from .algebra import Element, ShortAlgebra
from .presentation import (
    ParseError,
    _split_sections,
    linear_from_table,
    load_ring,
    parse_expression_text,
    tokenize,
    TokenStream,
    parse_polynomial,
)


class ComplexError(ValueError):
    """Shape mismatch, non-complex input, or a failed normalization step."""


class NotAComplex(ComplexError):
    """One of the adjacent composites is nonzero."""


class NormalizeError(ComplexError):
    """Condition for rescaling the composites to f*I fails at some position."""

    def __init__(self, message: str, position: int | None = None, coefficient=None):
        super().__init__(message)
        self.position = position
        self.coefficient = coefficient


@dataclass(eq=False)
class LinearMatrix:
    """c x b matrix whose entries are degree-1 coordinate vectors (length n)."""

    algebra: ShortAlgebra
    entries: np.ndarray  # shape (rows, cols, n)

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.int64) % self.algebra.p
        if self.entries.ndim != 3 or self.entries.shape[2] != self.algebra.n:
            raise ComplexError(
                f"entries must have shape (rows, cols, {self.algebra.n}), "
                f"got {self.entries.shape}"
            )

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def __eq__(self, other):
        if not isinstance(other, LinearMatrix):
            return NotImplemented
        same_algebra = (
            self.algebra is other.algebra
            or self.algebra.presentation == other.algebra.presentation
        )
        return same_algebra and np.array_equal(self.entries, other.entries)

    def entry(self, i: int, j: int) -> Element:
        return self.algebra.linear(self.entries[i, j])

    def transpose(self) -> "LinearMatrix":
        return LinearMatrix(self.algebra, self.entries.transpose(1, 0, 2))

    def scale(self, c: int) -> "LinearMatrix":
        return LinearMatrix(self.algebra, (c % self.algebra.p) * self.entries)

    def over(self, algebra: ShortAlgebra) -> "LinearMatrix":
        """The same coordinate entries reinterpreted over another algebra.

        Valid when the two algebras share the degree-1 coordinate space, as
        an R_1 presentation and the presentation with its distinguished
        quadric removed do; this is the canonical lift on linear entries.
        """
        if algebra.n != self.algebra.n:
            raise ComplexError("algebras do not share degree-1 coordinates")
        return LinearMatrix(algebra, self.entries)

    def mul_const_left(self, c: np.ndarray) -> "LinearMatrix":
        out = np.tensordot(c % self.algebra.p, self.entries, axes=(1, 0)) % self.algebra.p
        return LinearMatrix(self.algebra, out)

    def mul_const_right(self, c: np.ndarray) -> "LinearMatrix":
        out = np.einsum("rjn,jc->rcn", self.entries, c % self.algebra.p) % self.algebra.p
        return LinearMatrix(self.algebra, out)

    def column_matrix(self) -> np.ndarray:
        """Columns flattened to k-vectors: shape (rows*n, cols)."""
        return self.entries.transpose(0, 2, 1).reshape(self.rows * self.algebra.n, self.cols)

    def is_zero(self) -> bool:
        return not self.entries.any()


def matrix_from_elements(algebra: ShortAlgebra, grid) -> LinearMatrix:
    """Build from a nested list of degree-1 (or zero) Elements."""
    rows = len(grid)
    cols = len(grid[0]) if rows else 0
    out = np.zeros((rows, cols, algebra.n), dtype=np.int64)
    for i, row in enumerate(grid):
        if len(row) != cols:
            raise ComplexError("ragged matrix rows")
        for j, e in enumerate(row):
            if e.c0 or e.v2.any():
                raise ComplexError(f"entry ({i},{j}) is not homogeneous of degree 1")
            out[i, j] = e.v1
    return LinearMatrix(algebra, out)


def block_diag(blocks: list[LinearMatrix]) -> LinearMatrix:
    algebra = blocks[0].algebra
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = np.zeros((rows, cols, algebra.n), dtype=np.int64)
    r = c = 0
    for b in blocks:
        out[r : r + b.rows, c : c + b.cols] = b.entries
        r += b.rows
        c += b.cols
    return LinearMatrix(algebra, out)


def compose(a: LinearMatrix, b: LinearMatrix) -> np.ndarray:
    """Entrywise product a @ b as degree-2 coordinate vectors, shape (c, b', d)."""
    if a.algebra is not b.algebra and a.algebra.presentation != b.algebra.presentation:
        raise ComplexError("matrices live over different algebras")
    if a.cols != b.rows:
        raise ComplexError(f"shape mismatch: {a.rows}x{a.cols} then {b.rows}x{b.cols}")
    alg = a.algebra
    # out[i, k] = sum_j bilinear(a[i,j], b[j,k])
    out = np.einsum("ijn,nmt,jkm->ikt", a.entries, alg.tensor, b.entries) % alg.p
    return out


def degree_map(a: LinearMatrix) -> np.ndarray:
    """Induced k-linear map (R_1)^cols -> (R_2)^rows as a (rows*d, cols*n) matrix."""
    alg = a.algebra
    # block (i, j) is the d x n matrix v -> bilinear(a[i,j], v)
    blocks = np.einsum("ijn,nmt->ijtm", a.entries, alg.tensor) % alg.p
    return blocks.transpose(0, 2, 1, 3).reshape(a.rows * alg.d, a.cols * alg.n)


@dataclass(eq=False)
class ComplexWindow:
    """Finite run of chained maps; positions 1..L-1 have both neighbours."""

    maps: tuple[LinearMatrix, ...]

    def __post_init__(self):
        self.maps = tuple(self.maps)
        if not self.maps:
            raise ComplexError("empty window")
        for j in range(len(self.maps) - 1):
            if self.maps[j].cols != self.maps[j + 1].rows:
                raise ComplexError(
                    f"shape mismatch between maps {j} and {j + 1}: "
                    f"{self.maps[j].rows}x{self.maps[j].cols} then "
                    f"{self.maps[j + 1].rows}x{self.maps[j + 1].cols}"
                )

    def __eq__(self, other):
        if not isinstance(other, ComplexWindow):
            return NotImplemented
        return len(self.maps) == len(other.maps) and all(
            x == y for x, y in zip(self.maps, other.maps)
        )

    @property
    def algebra(self) -> ShortAlgebra:
        return self.maps[0].algebra

    def positions(self) -> range:
        return range(1, len(self.maps))

    def adjacent_pairs(self):
        """(position, outgoing, incoming) triples for every interior position."""
        for i in self.positions():
            yield i, self.maps[i - 1], self.maps[i]


@dataclass(eq=False)
class PeriodicComplex:
    """Maps m_0..m_{p-1} applied cyclically; every position is interior."""

    maps: tuple[LinearMatrix, ...]

    def __post_init__(self):
        self.maps = tuple(self.maps)
        if not self.maps:
            raise ComplexError("empty periodic complex")
        q = len(self.maps)
        for j in range(q):
            nxt = self.maps[(j + 1) % q]
            if self.maps[j].cols != nxt.rows:
                raise ComplexError(
                    f"cyclic shape mismatch between maps {j} and {(j + 1) % q}"
                )

    def __eq__(self, other):
        if not isinstance(other, PeriodicComplex):
            return NotImplemented
        return len(self.maps) == len(other.maps) and all(
            x == y for x, y in zip(self.maps, other.maps)
        )

    @property
    def algebra(self) -> ShortAlgebra:
        return self.maps[0].algebra

    @property
    def period(self) -> int:
        return len(self.maps)

    def positions(self) -> range:
        return range(self.period)

    def adjacent_pairs(self):
        q = self.period
        for i in range(q):
            yield i, self.maps[(i - 1) % q], self.maps[i]

    def ranks(self) -> list[int]:
        return [m.rows for m in self.maps]

    def unroll(self, length: int) -> ComplexWindow:
        return ComplexWindow(tuple(self.maps[j % self.period] for j in range(length)))


Complexlike = ComplexWindow | PeriodicComplex


def is_complex(w: Complexlike) -> bool:
    """All adjacent composites vanish as degree-2 matrices."""
    return all(not compose(out, inc).any() for _, out, inc in w.adjacent_pairs())


def dual(w: Complexlike) -> Complexlike:
    """Transpose every matrix and reverse the arrow order."""
    rev = tuple(m.transpose() for m in reversed(w.maps))
    return type(w)(rev)


def exactness_at(w: Complexlike, i: int) -> bool:
    """Exactness at position i (incoming m_i, outgoing m_{i-1}).

    Degree 0: the outgoing columns are k-linearly independent (nothing maps
    in, minimality maps nothing out of degree 0).
    Degree 1: kernel of the outgoing degree map equals the k-span of the
    incoming columns; containment holds because this is a complex, so only
    the dimensions are compared.
    Degree 2: the incoming degree map is surjective.
    """
    if i not in w.positions():
        raise ComplexError(f"position {i} has no incoming or outgoing map")
    if isinstance(w, PeriodicComplex):
        outgoing, incoming = w.maps[(i - 1) % w.period], w.maps[i]
    else:
        outgoing, incoming = w.maps[i - 1], w.maps[i]
    if compose(outgoing, incoming).any():
        raise NotAComplex(f"composite at position {i} is nonzero")
    alg = w.algebra
    fld = alg.field

    if fld.rank(outgoing.column_matrix()) != outgoing.cols:
        return False
    out_rank = fld.rank(degree_map(outgoing))
    kernel_dim = outgoing.cols * alg.n - out_rank
    span_dim = fld.rank(incoming.column_matrix())
    if kernel_dim != span_dim:
        return False
    in_rank = fld.rank(degree_map(incoming))
    return in_rank == incoming.rows * alg.d


def exactness_summary(w: Complexlike) -> dict[int, bool]:
    return {i: exactness_at(w, i) for i in w.positions()}


def is_totally_acyclic(c: PeriodicComplex) -> bool:
    """Complex + exact at every position + the same for the dual.

    When the verdict is true, the ranks must be constant and the ambient
    algebra must satisfy dim R_2 = dim R_1 - 1; both are asserted as
    internal consistency checks.
    """
    if not is_complex(c):
        return False
    if not all(exactness_at(c, i) for i in c.positions()):
        return False
    dc = dual(c)
    if not all(exactness_at(dc, i) for i in dc.positions()):
        return False
    ranks = c.ranks()
    if any(r > 0 for r in ranks):
        assert len(set(ranks)) == 1, "totally acyclic complex with non-constant ranks"
        assert c.algebra.d == c.algebra.n - 1, (
            "totally acyclic complex over an algebra with dim R_2 != dim R_1 - 1"
        )
    return True


# ---------------------------------------------------------------------------
# composites against a distinguished quadric
# ---------------------------------------------------------------------------

def product_f_coefficient(a: LinearMatrix, b: LinearMatrix, f: Element) -> np.ndarray | None:
    """Scalar matrix M with a @ b = f * M, or None if a composite entry
    leaves the line spanned by f (the pair then does not descend to a
    complex where f is killed)."""
    fvec = f.v2 % a.algebra.p
    if not fvec.any():
        raise ComplexError("distinguished element has zero degree-2 image")
    comp = compose(a, b)
    t = int(np.nonzero(fvec)[0][0])
    fld = a.algebra.field
    scale = fld.inv(int(fvec[t]))
    m = (comp[:, :, t] * scale) % a.algebra.p
    if not np.array_equal(np.einsum("ij,t->ijt", m, fvec) % a.algebra.p, comp):
        return None
    return m


def lift_complex(c: Complexlike, r0: ShortAlgebra) -> list[LinearMatrix]:
    """Canonical lifts of all maps (same linear coordinates, over r0)."""
    return [m.over(r0) for m in c.maps]


def condition8_check(c: PeriodicComplex, r0: ShortAlgebra, f: Element) -> bool:
    """The lifting condition: f * R_0^rows lies in the image of every lifted map.

    For each map in one period, lift it to r0 and test that f*e_j is in the
    image of the induced degree map for every standard basis column e_j.
    """
    fvec = f.v2 % r0.p
    if not fvec.any():
        raise ComplexError("distinguished element is zero in the lift algebra")
    fld = r0.field
    for m in c.maps:
        lifted = m.over(r0)
        dm = degree_map(lifted)
        for j in range(lifted.rows):
            target = np.zeros(lifted.rows * r0.d, dtype=np.int64)
            target[j * r0.d : (j + 1) * r0.d] = fvec
            if fld.membership(dm, target) is None:
                return False
    return True


def normalize(
    c: PeriodicComplex,
    r0: ShortAlgebra,
    f: Element,
    window_length: int = 8,
) -> Complexlike:
    """Rescale a complex so adjacent lifted composites equal f times the identity.

    Returns a window of `window_length` maps; if the result repeats with
    period two it is returned as a PeriodicComplex instead.  Exactness at
    every position is preserved: only invertible constant basis changes are
    applied.
    """
    if window_length < 2:
        raise ComplexError("window_length must be at least 2")
    ranks = set(c.ranks())
    if len(ranks) != 1:
        raise NormalizeError("normalization requires constant ranks")
    b = ranks.pop()
    fld = r0.field
    unrolled = [c.maps[j % c.period].over(r0) for j in range(window_length + 1)]

    coeffs = []
    for i in range(window_length):
        u = product_f_coefficient(unrolled[i], unrolled[i + 1], f)
        if u is None:
            raise NormalizeError(
                f"composite at position {i} leaves the span of the distinguished quadric",
                position=i,
            )
        coeffs.append(u)

    ident = fld.eye(b)
    v = ident
    w = ident
    out_maps: list[LinearMatrix] = []
    for i in range(window_length):
        out_maps.append(unrolled[i].mul_const_left(v).mul_const_right(w))
        vu = fld.matmul(v, coeffs[i])
        vu_inv = fld.invert(vu)
        if vu_inv is None:
            raise NormalizeError(
                f"coefficient matrix U_{i} is not invertible "
                f"(condition for lifting fails at position {i})",
                position=i,
                coefficient=coeffs[i],
            )
        v, w = fld.invert(w), vu_inv

    reduced = [m.over(c.algebra) for m in out_maps]
    # two full periods of agreement are needed before folding back up
    if window_length >= 4 and all(reduced[i] == reduced[i % 2] for i in range(len(reduced))):
        return PeriodicComplex((reduced[0], reduced[1]))
    return ComplexWindow(tuple(reduced))


# ---------------------------------------------------------------------------
# .cx files
# ---------------------------------------------------------------------------

def _parse_matrix_tokens(ts: TokenStream, algebra: ShortAlgebra, aliases) -> LinearMatrix:
    varmap = {v: k for k, v in enumerate(algebra.presentation.variables)}
    ts.expect_sym("[")
    rows = []
    while True:
        ts.expect_sym("[")
        row = []
        while True:
            table = parse_polynomial(ts, varmap, algebra.p, aliases)
            tok = ts.peek()
            vec = linear_from_table(table, algebra.n, tok[2] if tok else None)
            row.append(vec)
            if ts.at_sym(","):
                ts.next()
                continue
            ts.expect_sym("]")
            break
        rows.append(row)
        if ts.at_sym(","):
            ts.next()
            continue
        ts.expect_sym("]")
        break
    cols = len(rows[0])
    if any(len(r) != cols for r in rows):
        raise ParseError("ragged matrix rows")
    entries = np.zeros((len(rows), cols, algebra.n), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, vec in enumerate(row):
            entries[i, j] = vec
    return LinearMatrix(algebra, entries)


def parse_complex_file(
    text: str,
    ring: "Presentation | None" = None,
    base_dir: str | None = None,
    prime: int | None = None,
) -> PeriodicComplex:
    """Parse a .cx file into a PeriodicComplex.

    The [ring] section names a .ring file, resolved relative to `base_dir`
    unless a presentation is passed in directly.  Entries must be
    homogeneous of degree one (zero entries written as 0); shapes must
    chain cyclically and the number of matrices must equal the period.
    """
    from .presentation import Presentation  # local import to avoid cycles
    from .algebra import ShortAlgebra

    sections = _split_sections(text)
    ring_ref = None
    period = None
    alias_lines: list[tuple[int, str]] = []
    matrices: dict[int, list[tuple[int, str]]] = {}
    for name, arg, content in sections:
        if name == "ring":
            joined = (arg + " " + " ".join(c for _, c in content)).strip()
            ring_ref = joined
        elif name == "period":
            joined = (arg + " " + " ".join(c for _, c in content)).strip()
            if not re.fullmatch(r"\d+", joined):
                raise ParseError(f"[period] expects an integer, got {joined!r}")
            period = int(joined)
        elif name == "let":
            alias_lines.extend(content)
            if arg:
                alias_lines.append((0, arg))
        elif name == "matrix":
            if not re.fullmatch(r"\d+", arg or ""):
                raise ParseError(f"[matrix] needs an index, got {arg!r}")
            matrices[int(arg)] = list(content)
        else:
            raise ParseError(f"unknown section [{name}] in complex file")

    if ring is None:
        if ring_ref is None:
            raise ParseError("missing [ring] section")
        path = ring_ref if os.path.isabs(ring_ref) else os.path.join(base_dir or ".", ring_ref)
        if not os.path.exists(path):
            raise ParseError(f"ring file {ring_ref!r} not found")
        ring = load_ring(path, prime=prime)
    algebra = ShortAlgebra(ring)
    varmap = {v: k for k, v in enumerate(ring.variables)}

    aliases: dict[str, np.ndarray] = {}
    for lineno, line in alias_lines:
        m = re.fullmatch(r"(?:let\s+)?([a-zA-Z][a-zA-Z0-9_]*)\s*=\s*(.+)", line)
        if not m:
            raise ParseError(f"bad alias line {line!r}", lineno)
        name, expr = m.group(1), m.group(2)
        if name in varmap:
            raise ParseError(f"alias {name!r} shadows a variable", lineno)
        table = parse_expression_text(expr, varmap, algebra.p, aliases=aliases, line=lineno)
        aliases[name] = linear_from_table(table, algebra.n, lineno)

    if period is None:
        raise ParseError("missing [period] section")
    if sorted(matrices) != list(range(period)):
        raise ParseError(
            f"expected matrices 0..{period - 1}, found {sorted(matrices)}"
        )

    maps = []
    for k in range(period):
        content = matrices[k]
        if not content:
            raise ParseError(f"[matrix {k}] is empty")
        first_line = content[0][0]
        joined = " ".join(c for _, c in content)
        ts = TokenStream(tokenize(joined, line=first_line))
        mat = _parse_matrix_tokens(ts, algebra, aliases)
        if not ts.done():
            tok = ts.peek()
            raise ParseError(f"trailing input {tok[1]!r} after matrix", tok[2], tok[3])
        maps.append(mat)
    try:
        return PeriodicComplex(tuple(maps))
    except ComplexError as e:
        raise ParseError(str(e)) from e


def serialize_complex(c: PeriodicComplex, ring_ref: str) -> str:
    alg = c.algebra
    lines = [f"[ring] {ring_ref}", f"[period] {c.period}"]
    for k, m in enumerate(c.maps):
        lines.append(f"[matrix {k}]")
        rows = []
        for i in range(m.rows):
            cells = []
            for j in range(m.cols):
                e = alg.linear(m.entries[i, j])
                text = alg.element_text(e)
                cells.append(text)
            rows.append("[" + ", ".join(cells) + "]")
        lines.append("[" + ", ".join(rows) + "]")
    return "\n".join(lines) + "\n"


@dataclass(eq=False)
class ComplexBundle:
    """A parsed complex together with its ambient ring and the file reference."""

    complex: PeriodicComplex
    ring: "object"  # Presentation; typed loosely to avoid an import cycle
    ring_ref: str


def load_complex_bundle(path, prime: int | None = None) -> ComplexBundle:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    base = os.path.dirname(os.path.abspath(path))
    ring_ref = None
    for name, arg, content in _split_sections(text):
        if name == "ring":
            ring_ref = (arg + " " + " ".join(c for _, c in content)).strip()
    if ring_ref is None:
        raise ParseError("missing [ring] section")
    ring_path = ring_ref if os.path.isabs(ring_ref) else os.path.join(base, ring_ref)
    if not os.path.exists(ring_path):
        raise ParseError(f"ring file {ring_ref!r} not found")
    ring = load_ring(ring_path, prime=prime)
    cpx = parse_complex_file(text, ring=ring)
    return ComplexBundle(cpx, ring, ring_ref)


def load_complex(path, prime: int | None = None) -> PeriodicComplex:
    return load_complex_bundle(path, prime=prime).complex
