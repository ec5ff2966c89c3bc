"""Exact zero divisor pairs among linear forms, and their period-2 complexes.

Only linear pairs are searched: over a short algebra carrying minimal
totally acyclic complexes the differentials have linear entries, and a pair
(a, b) with ann(a) = (b) and ann(b) = (a) then forces dim R_2 = dim R_1 - 1.
Under that dimension count, (a, b) is an exact zero divisor pair iff the
kernel of multiplication by each one is the line spanned by the other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Element, ShortAlgebra
from .complexes import LinearMatrix, PeriodicComplex

try:  # the exhaustive scan is hot; fall back to numpy when numba is absent
    import numba as _nb
except ImportError:  # pragma: no cover
    _nb = None


class EzdError(ValueError):
    """Bad input to a verification or search routine."""


class SearchBudgetError(RuntimeError):
    """Enumeration would exceed the configured budget; pass force=True to insist."""


@dataclass(eq=False)
class EzdPair:
    a: Element
    b: Element

    def __eq__(self, other):
        if not isinstance(other, EzdPair):
            return NotImplemented
        return self.a == other.a and self.b == other.b


def _require_linear(e: Element, name: str):
    if e.c0 or e.v2.any():
        raise EzdError(f"{name} must be homogeneous of degree 1")
    if not e.v1.any():
        raise EzdError(f"{name} must be nonzero")


def canonical_scale(field, v: np.ndarray) -> np.ndarray:
    """Scale so the first nonzero coordinate is 1 (projective representative)."""
    nz = np.nonzero(v)[0]
    if nz.size == 0:
        return v.copy()
    return (v * field.inv(int(v[nz[0]]))) % field.p


def _spans_same_line(field, u: np.ndarray, v: np.ndarray) -> bool:
    return np.array_equal(canonical_scale(field, u), canonical_scale(field, v))


def verify_ezd(algebra: ShortAlgebra, a: Element, b: Element) -> bool:
    """True iff ann(a) = (b) and ann(b) = (a) for linear a, b.

    Returns False immediately when dim R_2 != dim R_1 - 1: a linear exact
    zero divisor forces that count, so no pair can verify.
    """
    _require_linear(a, "a")
    _require_linear(b, "b")
    if algebra.d != algebra.n - 1:
        return False
    if not algebra.multiply(a, b).is_zero():
        return False
    fld = algebra.field
    ka = fld.kernel_basis(algebra.multiplication_map(a.v1))
    if ka.shape[1] != 1 or not _spans_same_line(fld, ka[:, 0], b.v1):
        return False
    kb = fld.kernel_basis(algebra.multiplication_map(b.v1))
    return kb.shape[1] == 1 and _spans_same_line(fld, kb[:, 0], a.v1)


def ezd_complex(algebra: ShortAlgebra, a: Element, b: Element) -> PeriodicComplex:
    """The period-2 rank-1 complex ... -> R -a-> R -b-> R -> ...; totally acyclic."""
    if not verify_ezd(algebra, a, b):
        raise EzdError("pair fails exact zero divisor verification")
    ma = LinearMatrix(algebra, a.v1.reshape(1, 1, -1))
    mb = LinearMatrix(algebra, b.v1.reshape(1, 1, -1))
    return PeriodicComplex((ma, mb))


# ---------------------------------------------------------------------------
# searches
# ---------------------------------------------------------------------------

def _scan_python(tensor: np.ndarray, p: int):
    """Reference implementation of the exhaustive projective scan."""
    from .linalg import PrimeField

    fld = PrimeField(p)
    n, _, d = tensor.shape
    found = []
    for lead in range(n):
        tail_len = n - lead - 1
        tail = np.zeros(tail_len, dtype=np.int64)
        while True:
            a = np.zeros(n, dtype=np.int64)
            a[lead] = 1
            a[lead + 1 :] = tail
            la = np.tensordot(a, tensor, axes=(0, 0)).T % p
            ka = fld.kernel_basis(la)
            if ka.shape[1] == 1:
                b = canonical_scale(fld, ka[:, 0])
                lb = np.tensordot(b, tensor, axes=(0, 0)).T % p
                if fld.kernel_basis(lb).shape[1] == 1:
                    found.append((a, b))
            # odometer over the tail, last position fastest
            k = tail_len - 1
            while k >= 0 and tail[k] == p - 1:
                tail[k] = 0
                k -= 1
            if k < 0:
                break
            tail[k] += 1
    return found


if _nb is not None:

    @_nb.njit(cache=True)
    def _modinv(a, p):  # pragma: no cover - exercised through the scan
        result = 1
        base = a % p
        e = p - 2
        while e > 0:
            if e & 1:
                result = (result * base) % p
            base = (base * base) % p
            e >>= 1
        return result

    @_nb.njit(cache=True)
    def _kernel_line(m, p, d, n, out):  # pragma: no cover
        """Eliminate m (d x n) in place; if the kernel is a line, fill `out`
        with its canonical generator and return 1, else return the kernel dim."""
        piv_row = np.full(n, -1, dtype=np.int64)
        r = 0
        for c in range(n):
            if r == d:
                break
            pr = -1
            for i in range(r, d):
                if m[i, c] != 0:
                    pr = i
                    break
            if pr == -1:
                continue
            if pr != r:
                for j in range(n):
                    tmp = m[r, j]
                    m[r, j] = m[pr, j]
                    m[pr, j] = tmp
            inv = _modinv(m[r, c], p)
            for j in range(c, n):
                m[r, j] = (m[r, j] * inv) % p
            for i in range(d):
                if i != r and m[i, c] != 0:
                    f = m[i, c]
                    for j in range(c, n):
                        m[i, j] = (m[i, j] - f * m[r, j]) % p
            piv_row[c] = r
            r += 1
        kdim = n - r
        if kdim != 1:
            return kdim
        free = -1
        for c in range(n):
            if piv_row[c] < 0:
                free = c
                break
        for c in range(n):
            out[c] = 0
        out[free] = 1
        for c in range(n):
            if piv_row[c] >= 0:
                out[c] = (-m[piv_row[c], free]) % p
        # canonical scale: first nonzero coordinate is a pivot-free pattern
        lead = -1
        for c in range(n):
            if out[c] != 0:
                lead = c
                break
        inv = _modinv(out[lead], p)
        for c in range(n):
            out[c] = (out[c] * inv) % p
        return 1

    @_nb.njit(cache=True)
    def _scan_jit(tensor, p, cap):  # pragma: no cover
        n = tensor.shape[0]
        d = tensor.shape[2]
        pairs = np.zeros((cap, 2, n), dtype=np.int64)
        count = 0
        overflow = False
        a = np.zeros(n, dtype=np.int64)
        b = np.zeros(n, dtype=np.int64)
        la = np.zeros((d, n), dtype=np.int64)
        lb = np.zeros((d, n), dtype=np.int64)
        for lead in range(n):
            for c in range(n):
                a[c] = 0
            a[lead] = 1
            while True:
                for k in range(d):
                    for j in range(n):
                        acc = 0
                        for i in range(lead, n):
                            if a[i] != 0:
                                acc += a[i] * tensor[i, j, k]
                        la[k, j] = acc % p
                if _kernel_line(la, p, d, n, b) == 1:
                    for k in range(d):
                        for j in range(n):
                            acc = 0
                            for i in range(n):
                                if b[i] != 0:
                                    acc += b[i] * tensor[i, j, k]
                            lb[k, j] = acc % p
                    rank = 0
                    r = 0
                    for c in range(n):
                        if r == d:
                            break
                        pr = -1
                        for i in range(r, d):
                            if lb[i, c] != 0:
                                pr = i
                                break
                        if pr == -1:
                            continue
                        if pr != r:
                            for j in range(n):
                                tmp = lb[r, j]
                                lb[r, j] = lb[pr, j]
                                lb[pr, j] = tmp
                        inv = _modinv(lb[r, c], p)
                        for j in range(c, n):
                            lb[r, j] = (lb[r, j] * inv) % p
                        for i in range(d):
                            if i != r and lb[i, c] != 0:
                                f = lb[i, c]
                                for j in range(c, n):
                                    lb[i, j] = (lb[i, j] - f * lb[r, j]) % p
                        r += 1
                    rank = r
                    if n - rank == 1:
                        if count < cap:
                            for c in range(n):
                                pairs[count, 0, c] = a[c]
                                pairs[count, 1, c] = b[c]
                            count += 1
                        else:
                            overflow = True
                # odometer on positions lead+1 .. n-1, last fastest
                k = n - 1
                while k > lead and a[k] == p - 1:
                    a[k] = 0
                    k -= 1
                if k == lead:
                    break
                a[k] += 1
        return pairs, count, overflow


def search_ezd_exhaustive(
    algebra: ShortAlgebra,
    budget: int = 10**7,
    force: bool = False,
) -> list[EzdPair]:
    """All linear exact zero divisor pairs, one per projective candidate a.

    Candidates are scanned with first nonzero coordinate 1, leading index
    ascending and the remaining coordinates in lex order; the partner b is
    reported canonicalized the same way.  Refuses when p**n exceeds the
    budget unless forced.
    """
    n, p = algebra.n, algebra.p
    if n == 0:
        return []
    if p**n > budget and not force:
        raise SearchBudgetError(
            f"enumeration size {p}**{n} exceeds budget {budget}; use force to override"
        )
    # a linear pair forces dim R_2 = dim R_1 - 1, so nothing can verify
    if algebra.d != algebra.n - 1:
        return []

    if _nb is not None:
        cap = 65536
        pairs_mat, count, overflow = _scan_jit(algebra.tensor, p, cap)
        if overflow:  # pragma: no cover - absurdly many pairs
            raise SearchBudgetError("more pairs found than the result buffer holds")
        raw = [(pairs_mat[k, 0].copy(), pairs_mat[k, 1].copy()) for k in range(count)]
    else:  # pragma: no cover - numba available in the supported environment
        raw = _scan_python(algebra.tensor, p)

    pairs = []
    for av, bv in raw:
        pair = EzdPair(algebra.linear(av), algebra.linear(bv))
        if not verify_ezd(algebra, pair.a, pair.b):
            raise AssertionError("search produced a pair that fails verification")
        pairs.append(pair)
    return pairs


def search_ezd_random(
    algebra: ShortAlgebra,
    trials: int,
    seed: int = 0,
) -> EzdPair | None:
    """Sample candidates uniformly; first verified pair wins (deterministic per seed)."""
    if trials < 1:
        raise EzdError("trials must be at least 1")
    if algebra.n == 0 or algebra.d != algebra.n - 1:
        return None
    rng = np.random.default_rng(seed)
    fld = algebra.field
    for _ in range(trials):
        v = rng.integers(0, algebra.p, size=algebra.n, dtype=np.int64)
        if not v.any():
            continue
        a = canonical_scale(fld, v)
        ka = fld.kernel_basis(algebra.multiplication_map(a))
        if ka.shape[1] != 1:
            continue
        b = canonical_scale(fld, ka[:, 0])
        pair = EzdPair(algebra.linear(a), algebra.linear(b))
        if verify_ezd(algebra, pair.a, pair.b):
            return pair
    return None
