"""Ring presentations, bipartite graphs, and the text formats that carry them.

A presentation is the textual source of every algebra in the package: an
ordered variable list, a list of homogeneous quadrics (coefficient tables
over monomials x_i*x_j with i <= j), and an optional distinguished quadric.

File formats:

  .ring   sections [field] (optional), [vars], [quadrics], [distinguished]
  .graph  header line "n m", then one edge "x<i> y<j>" per line

Comments run from '#' to end of line.  Reports are JSON documents with a
stable key order so they can be diffed.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field

import numpy as np

from .linalg import DEFAULT_PRIME, PrimeField


class ParseError(ValueError):
    """Syntax or semantic error in an input file, with location when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}"
            if col is not None:
                where += f", col {col}"
            where += ": "
        super().__init__(where + message)


class InvalidPresentation(ValueError):
    """A programmatically built presentation violates its invariants."""


IDENT_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")
SECTION_RE = re.compile(r"^\[\s*([a-zA-Z]+)(?:\s+([^\[\]]*?))?\s*\](.*)$")


# ---------------------------------------------------------------------------
# tokenizer and expression parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<int>\d+)|(?P<ident>[a-zA-Z][a-zA-Z0-9_]*)|(?P<sym>[-+*^(),\[\]=])"
)


def tokenize(text: str, line: int = 1):
    """Tokens as (kind, value, line, col); raises on unexpected characters."""
    tokens = []
    for lineno, raw in enumerate(text.splitlines() or [""], start=line):
        body = raw.split("#", 1)[0]
        pos = 0
        while pos < len(body):
            m = _TOKEN_RE.match(body, pos)
            if m is None:
                raise ParseError(f"unexpected character {body[pos]!r}", lineno, pos + 1)
            if m.lastgroup != "ws":
                tokens.append((m.lastgroup, m.group(), lineno, pos + 1))
            pos = m.end()
    return tokens


class TokenStream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.i += 1
        return tok

    def at_sym(self, *symbols) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == "sym" and tok[1] in symbols

    def expect_sym(self, symbol):
        tok = self.next()
        if tok[0] != "sym" or tok[1] != symbol:
            raise ParseError(f"expected {symbol!r}, found {tok[1]!r}", tok[2], tok[3])
        return tok

    def done(self) -> bool:
        return self.i >= len(self.tokens)


def _parse_term(ts: TokenStream):
    """One term: optional integer coefficient, then variable factors."""
    tok = ts.peek()
    if tok is None:
        raise ParseError("expected a term")
    coeff = 1
    factors: list[tuple[str, int, int]] = []  # (name, line, col)
    if tok[0] == "int":
        ts.next()
        coeff = int(tok[1])
        if not ts.at_sym("*"):
            return coeff, factors  # bare constant; only 0 survives validation
        ts.next()
    while True:
        tok = ts.next()
        if tok[0] != "ident":
            raise ParseError(f"expected a variable, found {tok[1]!r}", tok[2], tok[3])
        factors.append((tok[1], tok[2], tok[3]))
        if ts.at_sym("^"):
            ts.next()
            etok = ts.next()
            if etok[0] != "int":
                raise ParseError(f"expected an exponent, found {etok[1]!r}", etok[2], etok[3])
            if int(etok[1]) != 2:
                raise ParseError(
                    f"degree error: only squares occur, found ^{etok[1]}", etok[2], etok[3]
                )
            factors.append((tok[1], tok[2], tok[3]))
        if ts.at_sym("*"):
            ts.next()
            continue
        break
    return coeff, factors


def parse_polynomial(
    ts: TokenStream,
    varmap: dict[str, int],
    prime: int,
    aliases: dict[str, np.ndarray] | None = None,
) -> dict[tuple, int]:
    """Parse an expression into a coefficient table keyed by sorted index tuples.

    Keys: () constant, (i,) linear, (i, j) with i <= j quadratic.  Aliases
    expand to linear combinations and may only appear as standalone factors.
    Terms of degree three or more are rejected.
    """
    aliases = aliases or {}
    table: dict[tuple, int] = {}

    def add(key: tuple, c: int):
        c %= prime
        if c == 0:
            return
        cur = (table.get(key, 0) + c) % prime
        if cur:
            table[key] = cur
        else:
            table.pop(key, None)

    sign = 1
    if ts.at_sym("+", "-"):
        sign = -1 if ts.next()[1] == "-" else 1
    while True:
        coeff, factors = _parse_term(ts)
        coeff = sign * coeff
        names = [f[0] for f in factors]
        alias_hits = [f for f in factors if f[0] in aliases and f[0] not in varmap]
        if alias_hits:
            if len(factors) != 1:
                name, line, col = alias_hits[0]
                raise ParseError(f"alias {name!r} may only be used linearly", line, col)
            vec = aliases[names[0]]
            for i in np.nonzero(vec)[0]:
                add((int(i),), coeff * int(vec[i]))
        else:
            idx = []
            for name, line, col in factors:
                if name not in varmap:
                    raise ParseError(f"unknown variable {name!r}", line, col)
                idx.append(varmap[name])
            if len(idx) > 2:
                line, col = factors[0][1], factors[0][2]
                raise ParseError(f"degree error: term of degree {len(idx)}", line, col)
            add(tuple(sorted(idx)), coeff)
        if ts.at_sym("+", "-"):
            sign = -1 if ts.next()[1] == "-" else 1
            continue
        break
    return table


def parse_expression_text(
    text: str,
    varmap: dict[str, int],
    prime: int,
    aliases: dict[str, np.ndarray] | None = None,
    line: int = 1,
) -> dict[tuple, int]:
    ts = TokenStream(tokenize(text, line=line))
    if ts.done():
        raise ParseError("empty expression", line)
    table = parse_polynomial(ts, varmap, prime, aliases)
    if not ts.done():
        tok = ts.peek()
        raise ParseError(f"trailing input {tok[1]!r}", tok[2], tok[3])
    return table


def quadric_from_table(table: dict[tuple, int], line: int | None = None) -> dict[tuple[int, int], int]:
    for key in table:
        if len(key) != 2:
            what = "constant" if len(key) == 0 else "linear"
            raise ParseError(f"non-homogeneous quadric: {what} term present", line)
    if not table:
        raise ParseError("zero quadric", line)
    return dict(sorted(table.items()))


def linear_from_table(table: dict[tuple, int], n: int, line: int | None = None) -> np.ndarray:
    vec = np.zeros(n, dtype=np.int64)
    for key, c in table.items():
        if len(key) != 1:
            raise ParseError("degree error: expected a linear form", line)
        vec[key[0]] = c
    return vec


# ---------------------------------------------------------------------------
# presentations
# ---------------------------------------------------------------------------

def monomial_pairs(n: int) -> list[tuple[int, int]]:
    """Degree-2 monomials x_i x_j, i <= j, in lex order on (i, j)."""
    return [(i, j) for i in range(n) for j in range(i, n)]


@dataclass
class Presentation:
    """Variables, homogeneous quadrics, optional distinguished quadric."""

    variables: tuple[str, ...]
    quadrics: tuple[dict[tuple[int, int], int], ...]
    distinguished: int | None = None
    prime: int = DEFAULT_PRIME

    def __post_init__(self):
        self.variables = tuple(self.variables)
        self.quadrics = tuple(dict(sorted(q.items())) for q in self.quadrics)

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.prime)

    def monomials(self) -> list[tuple[int, int]]:
        return monomial_pairs(self.n)

    def coefficient_matrix(self) -> np.ndarray:
        """(num quadrics) x (num degree-2 monomials) coefficient matrix."""
        pairs = self.monomials()
        index = {pair: k for k, pair in enumerate(pairs)}
        m = np.zeros((len(self.quadrics), len(pairs)), dtype=np.int64)
        for r, quad in enumerate(self.quadrics):
            for (i, j), c in quad.items():
                m[r, index[(i, j)]] = c % self.prime
        return m

    def validate(self):
        if len(set(self.variables)) != self.n:
            raise InvalidPresentation("duplicate variable names")
        for name in self.variables:
            if not IDENT_RE.fullmatch(name):
                raise InvalidPresentation(f"bad variable name {name!r}")
        for q in self.quadrics:
            if not q:
                raise InvalidPresentation("zero quadric")
            for (i, j), c in q.items():
                if not (0 <= i <= j < self.n):
                    raise InvalidPresentation(f"monomial index {(i, j)} out of range")
                if c % self.prime == 0:
                    raise InvalidPresentation("zero coefficient stored in quadric")
        if self.distinguished is not None:
            k = self.distinguished
            if not (0 <= k < len(self.quadrics)):
                raise InvalidPresentation(f"distinguished index {k} out of range")
            fld = self.field
            m = self.coefficient_matrix()
            others = np.delete(m, k, axis=0)
            if fld.rank(m) == fld.rank(others):
                raise InvalidPresentation(
                    "distinguished quadric lies in the span of the others"
                )
        return self

    def distinguished_quadric(self) -> dict[tuple[int, int], int]:
        if self.distinguished is None:
            raise InvalidPresentation("presentation has no distinguished quadric")
        return self.quadrics[self.distinguished]

    def without_distinguished(self) -> "Presentation":
        """Drop the distinguished quadric (keeping everything else)."""
        if self.distinguished is None:
            raise InvalidPresentation("presentation has no distinguished quadric")
        rest = tuple(q for k, q in enumerate(self.quadrics) if k != self.distinguished)
        return Presentation(self.variables, rest, None, self.prime)

    def rename(self, mapping: dict[str, str]) -> "Presentation":
        """Rename variables; mapping must cover no collisions."""
        new_vars = tuple(mapping.get(v, v) for v in self.variables)
        p = Presentation(new_vars, self.quadrics, self.distinguished, self.prime)
        p.validate()
        return p

    def with_prime(self, prime: int) -> "Presentation":
        """Reinterpret over another prime via symmetric representatives.

        A residue is lifted to its smallest-magnitude integer first, so a
        coefficient written as -1 in the source stays -1 over every field.
        """
        PrimeField(prime)

        def lift(c: int) -> int:
            c %= self.prime
            return c - self.prime if c > self.prime // 2 else c

        quads = []
        for q in self.quadrics:
            nq = {key: lift(c) % prime for key, c in q.items() if lift(c) % prime}
            if not nq:
                raise InvalidPresentation(f"quadric becomes zero over F_{prime}")
            quads.append(nq)
        p = Presentation(self.variables, tuple(quads), self.distinguished, prime)
        p.validate()
        return p

    def quadric_text(self, quad: dict[tuple[int, int], int]) -> str:
        parts = []
        for (i, j), c in sorted(quad.items()):
            c %= self.prime
            mono = f"{self.variables[i]}^2" if i == j else f"{self.variables[i]}*{self.variables[j]}"
            # small negative residues read better in files
            if c > self.prime - c:
                sgn, mag = "-", self.prime - c
            else:
                sgn, mag = "+", c
            text = mono if mag == 1 else f"{mag}*{mono}"
            parts.append((sgn, text))
        out = ""
        for k, (sgn, text) in enumerate(parts):
            if k == 0:
                out = ("-" if sgn == "-" else "") + text
            else:
                out += f" {sgn} {text}"
        return out


def presentations_equivalent(a: Presentation, b: Presentation) -> bool:
    """Same prime, same variables, same quadric row space."""
    if a.prime != b.prime or a.variables != b.variables:
        return False
    fld = a.field
    ra, _ = fld.rref(a.coefficient_matrix())
    rb, _ = fld.rref(b.coefficient_matrix())
    ra = ra[: fld.rank(a.coefficient_matrix())]
    rb = rb[: fld.rank(b.coefficient_matrix())]
    return ra.shape == rb.shape and bool(np.array_equal(ra, rb))


# ---------------------------------------------------------------------------
# ring files
# ---------------------------------------------------------------------------

def _split_sections(text: str):
    """Yield (name, arg, [(lineno, content), ...]) per section, in order."""
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        m = SECTION_RE.match(body.strip())
        # a nested '[' right after the header bracket means a matrix row, not a header
        if m and not body.strip().startswith("[["):
            name, arg, rest = m.group(1), m.group(2), m.group(3)
            current = (name.lower(), (arg or "").strip(), [])
            sections.append(current)
            if rest and rest.strip():
                current[2].append((lineno, rest.strip()))
        else:
            if current is None:
                raise ParseError(f"content before any section: {body.strip()!r}", lineno)
            current[2].append((lineno, body.strip()))
    return sections


def parse_ring_file(text: str, prime: int | None = None) -> Presentation:
    """Parse a .ring file; `prime` overrides any [field] section."""
    sections = _split_sections(text)
    names = [s[0] for s in sections]
    for name in names:
        if name not in ("field", "vars", "quadrics", "distinguished"):
            raise ParseError(f"unknown section [{name}]")

    file_prime = None
    for name, _arg, content in sections:
        if name != "field":
            continue
        joined = " ".join(c for _, c in content)
        m = re.fullmatch(r"\s*p\s*=\s*(\d+)\s*", joined)
        if not m:
            raise ParseError(f"bad [field] section: {joined!r}")
        file_prime = int(m.group(1))
    p = prime if prime is not None else (file_prime if file_prime is not None else DEFAULT_PRIME)
    PrimeField(p)  # reject p = 2 and non-primes up front

    variables: list[str] = []
    for name, _arg, content in sections:
        if name != "vars":
            continue
        for lineno, line in content:
            for piece in re.split(r"[,\s]+", line):
                if not piece:
                    continue
                if not IDENT_RE.fullmatch(piece):
                    raise ParseError(f"bad variable name {piece!r}", lineno)
                if piece in variables:
                    raise ParseError(f"duplicate variable {piece!r}", lineno)
                variables.append(piece)
    if "vars" not in names:
        raise ParseError("missing [vars] section")
    varmap = {v: k for k, v in enumerate(variables)}

    quadrics: list[dict[tuple[int, int], int]] = []
    for name, _arg, content in sections:
        if name != "quadrics":
            continue
        for lineno, line in content:
            table = parse_expression_text(line, varmap, p, line=lineno)
            quadrics.append(quadric_from_table(table, lineno))

    distinguished = None
    for name, arg, content in sections:
        if name != "distinguished":
            continue
        joined = (arg + " " + " ".join(c for _, c in content)).strip()
        if not re.fullmatch(r"\d+", joined):
            raise ParseError(f"[distinguished] expects a 0-based quadric index, got {joined!r}")
        distinguished = int(joined)
        if not (0 <= distinguished < len(quadrics)):
            raise ParseError(f"distinguished index {distinguished} out of range")

    pres = Presentation(tuple(variables), tuple(quadrics), distinguished, p)
    try:
        pres.validate()
    except InvalidPresentation as e:
        raise ParseError(str(e)) from e
    return pres


def serialize_ring(p: Presentation) -> str:
    lines = [f"[field] p = {p.prime}", "[vars] " + " ".join(p.variables), "[quadrics]"]
    lines.extend(p.quadric_text(q) for q in p.quadrics)
    if p.distinguished is not None:
        lines.append(f"[distinguished] {p.distinguished}")
    return "\n".join(lines) + "\n"


def load_ring(path, prime: int | None = None) -> Presentation:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_ring_file(fh.read(), prime=prime)


# ---------------------------------------------------------------------------
# bipartite graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BipartiteGraph:
    """Bipartite graph on x_1..x_n, y_1..y_m; edges are 1-based (i, j) pairs."""

    n: int
    m: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(self.edges))
        for (i, j) in self.edges:
            if not (1 <= i <= self.n and 1 <= j <= self.m):
                raise InvalidPresentation(f"edge (x{i}, y{j}) out of range")

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.edges


_EDGE_RE = re.compile(r"^x(\d+)\s+y(\d+)$")


def parse_graph_file(text: str) -> BipartiteGraph:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body))
    if not lines:
        raise ParseError("empty graph file")
    lineno, header = lines[0]
    m = re.fullmatch(r"(\d+)\s+(\d+)", header)
    if not m:
        raise ParseError(f"expected header 'n m', got {header!r}", lineno)
    n, mm = int(m.group(1)), int(m.group(2))
    edges = set()
    for lineno, body in lines[1:]:
        em = _EDGE_RE.fullmatch(body)
        if not em:
            raise ParseError(f"malformed edge line {body!r}", lineno)
        i, j = int(em.group(1)), int(em.group(2))
        if not (1 <= i <= n):
            raise ParseError(f"x{i} out of range (n = {n})", lineno)
        if not (1 <= j <= mm):
            raise ParseError(f"y{j} out of range (m = {mm})", lineno)
        if (i, j) in edges:
            raise ParseError(f"duplicate edge x{i} y{j}", lineno)
        edges.add((i, j))
    return BipartiteGraph(n, mm, frozenset(edges))


def serialize_graph(g: BipartiteGraph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"x{i} y{j}" for i, j in sorted(g.edges))
    return "\n".join(lines) + "\n"


def load_graph(path) -> BipartiteGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph_file(fh.read())


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def _plain(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def write_report(record: dict, path) -> None:
    """Write a JSON report with stable key order; overwrites idempotently."""
    text = json.dumps(_plain(record), indent=2) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def report_text(record: dict) -> str:
    return json.dumps(_plain(record), indent=2)


def sha256_of(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()
