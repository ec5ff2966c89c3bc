"""Rings from bipartite graphs: edge-ideal quotients with two linear forms killed.

A connected bipartite graph on x_1..x_n, y_1..y_m whose induced subgraph on
all vertices but x_n, y_m splits into exactly two components A and B (and
with no edge x_n y_m) yields a ring on the surviving n+m-2 variables.  The
generators are every product of two x's, every product of two y's, and the
non-edge cross products, with x_n and y_m replaced by minus the sum of the
others.  The variable ideals spanned by the A- and B-side vertices then
multiply to zero and meet in the line spanned by delta = f_A * g_A.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Element, ShortAlgebra, verify_truncation
from .csum import InvariantViolation
from .ezd import search_ezd_exhaustive
from .linalg import DEFAULT_PRIME
from .presentation import BipartiteGraph, InvalidPresentation, Presentation


class GraphHypothesisError(ValueError):
    """The graph violates one of the named structural hypotheses."""


@dataclass(eq=False)
class GraphRingData:
    graph: BipartiteGraph
    components: tuple[tuple[int, ...], tuple[int, ...]]  # A-, B-side variable indices
    presentation: Presentation
    algebra: ShortAlgebra
    fA: Element
    fB: Element
    gA: Element
    gB: Element
    delta: Element

    @property
    def f(self) -> Element:
        return self.algebra.add(self.fA, self.fB)

    @property
    def g(self) -> Element:
        return self.algebra.add(self.gA, self.gB)


def _components(graph: BipartiteGraph, xs: list[int], ys: list[int]) -> list[set]:
    """Connected components of the induced subgraph on the given vertices."""
    verts = [("x", i) for i in xs] + [("y", j) for j in ys]
    vert_set = set(verts)
    seen: set = set()
    comps = []
    for start in verts:
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            side, k = stack.pop()
            if side == "x":
                nbrs = [("y", j) for j in ys if graph.has_edge(k, j)]
            else:
                nbrs = [("x", i) for i in xs if graph.has_edge(i, k)]
            for nb in nbrs:
                if nb in vert_set and nb not in comp:
                    comp.add(nb)
                    stack.append(nb)
        seen |= comp
        comps.append(comp)
    return comps


def build_from_graph(graph: BipartiteGraph, prime: int = DEFAULT_PRIME) -> GraphRingData:
    """Construct the ring and its gluing data; every hypothesis is re-checked.

    Raises GraphHypothesisError naming the violated hypothesis, and
    InvariantViolation when a structural consequence that the construction
    promises (truncation, delta spanning the degree-2 intersection) fails.
    """
    n, m = graph.n, graph.m
    if n < 2 or m < 2:
        raise GraphHypothesisError("need at least two vertices on each side")
    if graph.has_edge(n, m):
        raise GraphHypothesisError(f"vertices x{n} and y{m} must not be adjacent")
    whole = _components(graph, list(range(1, n + 1)), list(range(1, m + 1)))
    if len(whole) != 1:
        raise GraphHypothesisError("graph is not connected")
    comps = _components(graph, list(range(1, n)), list(range(1, m)))
    if len(comps) != 2:
        raise GraphHypothesisError(
            f"induced subgraph without x{n}, y{m} has {len(comps)} components, need exactly 2"
        )

    # surviving variables x_1..x_{n-1}, y_1..y_{m-1}
    nx, ny = n - 1, m - 1
    variables = tuple(f"x{i}" for i in range(1, n)) + tuple(f"y{j}" for j in range(1, m))

    def xvec(i: int) -> np.ndarray:
        v = np.zeros(nx + ny, dtype=np.int64)
        if i < n:
            v[i - 1] = 1
        else:
            v[:nx] = prime - 1
        return v

    def yvec(j: int) -> np.ndarray:
        v = np.zeros(nx + ny, dtype=np.int64)
        if j < m:
            v[nx + j - 1] = 1
        else:
            v[nx:] = prime - 1
        return v

    def product_table(u: np.ndarray, v: np.ndarray) -> dict:
        table: dict[tuple[int, int], int] = {}
        for a in np.nonzero(u)[0]:
            for b in np.nonzero(v)[0]:
                key = (int(min(a, b)), int(max(a, b)))
                c = (table.get(key, 0) + int(u[a]) * int(v[b])) % prime
                if c:
                    table[key] = c
                else:
                    table.pop(key, None)
        return table

    quadrics: list[dict] = []
    seen: set = set()

    def push(table: dict):
        if not table:
            return
        key = tuple(sorted(table.items()))
        if key not in seen:
            seen.add(key)
            quadrics.append(table)

    for i in range(1, n + 1):
        for j in range(i, n + 1):
            push(product_table(xvec(i), xvec(j)))
    for i in range(1, m + 1):
        for j in range(i, m + 1):
            push(product_table(yvec(i), yvec(j)))
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            if not graph.has_edge(i, j):
                push(product_table(xvec(i), yvec(j)))

    pres = Presentation(variables, tuple(quadrics), None, prime)
    try:
        pres.validate()
    except InvalidPresentation as e:
        raise GraphHypothesisError(f"degenerate presentation: {e}") from e
    if not verify_truncation(pres):
        raise InvariantViolation("graph ring fails the truncation certificate")
    algebra = ShortAlgebra(pres)

    comp_a, comp_b = sorted(comps, key=lambda c: sorted(c))
    if ("x", 1) in comp_b:  # keep the component containing x1 first, for stable reports
        comp_a, comp_b = comp_b, comp_a

    def var_index(side: str, k: int) -> int:
        return (k - 1) if side == "x" else nx + (k - 1)

    a_vars = tuple(sorted(var_index(s, k) for s, k in comp_a))
    b_vars = tuple(sorted(var_index(s, k) for s, k in comp_b))

    def side_sum(comp, side: str) -> Element:
        total = algebra.zero()
        for s, k in sorted(comp):
            if s == side:
                total = algebra.add(total, algebra.variable(var_index(s, k)))
        return total

    fA, fB = side_sum(comp_a, "x"), side_sum(comp_b, "x")
    gA, gB = side_sum(comp_a, "y"), side_sum(comp_b, "y")
    f = algebra.add(fA, fB)
    g = algebra.add(gA, gB)
    delta = algebra.multiply(fA, gA)

    if not algebra.multiply(f, g).is_zero():
        raise InvariantViolation("f * g is nonzero in the graph ring")
    if delta != algebra.scale(-1, algebra.multiply(fB, gB)):
        raise InvariantViolation("f_A g_A != -f_B g_B in the graph ring")
    for u in a_vars:
        for v in b_vars:
            if algebra.tensor[u, v].any():
                raise InvariantViolation("A-side and B-side variables do not annihilate")
    if delta.is_zero() or intersection_dimension(algebra, a_vars, b_vars) != 1:
        raise InvariantViolation(
            "degree-2 intersection of the side ideals is not the line spanned by delta"
        )

    return GraphRingData(
        graph=graph,
        components=(a_vars, b_vars),
        presentation=pres,
        algebra=algebra,
        fA=fA,
        fB=fB,
        gA=gA,
        gB=gB,
        delta=delta,
    )


def intersection_dimension(algebra: ShortAlgebra, a_vars, b_vars) -> int:
    """dim of (ideal of a_vars) meet (ideal of b_vars) in degree 2."""
    fld = algebra.field

    def span(vs):
        rows = [algebra.tensor[u, v] for u in vs for v in vs]
        return np.stack(rows) if rows else np.zeros((0, algebra.d), dtype=np.int64)

    sa, sb = span(a_vars), span(b_vars)
    ra, rb = fld.rank(sa), fld.rank(sb)
    rab = fld.rank(np.concatenate([sa, sb], axis=0))
    return ra + rb - rab


def no_ezd_spotcheck(
    data: GraphRingData | Presentation,
    proxy_prime: int = 3,
    budget: int = 10**7,
    force: bool = False,
) -> bool:
    """True iff the exhaustive search over the proxy field finds no pair.

    This is a consistency spot-check for graph-built rings, vacuously true
    for algebras with at most one variable; it decides nothing for general
    rings (plenty of non-graph rings do have exact zero divisors).
    """
    pres = data.presentation if isinstance(data, GraphRingData) else data
    if pres.n <= 1:
        return True
    proxy = ShortAlgebra(pres.with_prime(proxy_prime))
    return len(search_ezd_exhaustive(proxy, budget=budget, force=force)) == 0
