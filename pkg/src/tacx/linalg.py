"""Exact dense linear algebra over a prime field F_p.

Matrices are plain numpy int64 arrays with entries reduced into [0, p).
Elimination is deterministic (leftmost pivot column, first nonzero row
from the top), so kernel bases, particular solutions and inverses are
reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_PRIME = 32003


class FieldError(ValueError):
    """Invalid field configuration (non-prime or unsupported characteristic)."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field F_p for an odd prime p.

    Characteristic 2 is rejected: the sign conventions used throughout the
    constructions (alternating signs on one side of an assembled complex,
    differences of linear forms) degenerate when -1 == 1.
    """

    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if self.p == 2:
            raise FieldError(
                "p = 2 is not supported: sign-sensitive constructions require -1 != 1"
            )
        if self.p < 3 or not is_prime(self.p):
            raise FieldError(f"modulus {self.p} is not an odd prime")

    # scalar arithmetic -------------------------------------------------

    def normalize(self, a: int) -> int:
        return int(a) % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    # array helpers -----------------------------------------------------

    def array(self, data) -> np.ndarray:
        return np.asarray(data, dtype=np.int64) % self.p

    def zeros(self, *shape: int) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a @ b) % self.p

    def random_matrix(self, rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
        return rng.integers(0, self.p, size=(rows, cols), dtype=np.int64)

    # elimination -------------------------------------------------------

    def rref(self, m: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and ordered pivot columns."""
        a = self.array(m).copy()
        rows, cols = a.shape
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(a[r:, c])[0]
            if nz.size == 0:
                continue
            k = r + int(nz[0])
            if k != r:
                a[[r, k]] = a[[k, r]]
            a[r] = (a[r] * self.inv(int(a[r, c]))) % self.p
            col = a[:, c].copy()
            col[r] = 0
            a -= np.outer(col, a[r])
            a %= self.p
            pivots.append(c)
            r += 1
        return a, pivots

    def rank(self, m: np.ndarray) -> int:
        return len(self.rref(m)[1])

    def kernel_basis(self, m: np.ndarray) -> np.ndarray:
        """Columns form the canonical RREF-derived basis of the right kernel.

        Basis vectors are ordered by free-column index; the returned matrix
        has shape (cols, cols - rank).
        """
        a = self.array(m)
        rows, cols = a.shape
        r, pivots = self.rref(a)
        free = [c for c in range(cols) if c not in pivots]
        basis = np.zeros((cols, len(free)), dtype=np.int64)
        for idx, c in enumerate(free):
            basis[c, idx] = 1
            for row, pc in enumerate(pivots):
                basis[pc, idx] = (-r[row, c]) % self.p
        return basis

    def membership(self, m: np.ndarray, v: np.ndarray) -> np.ndarray | None:
        """A particular solution x of m @ x = v, or None if unsolvable.

        Free variables are set to zero, so the answer is deterministic.
        """
        a = self.array(m)
        b = self.array(v).reshape(-1)
        if b.shape[0] != a.shape[0]:
            raise ValueError(f"length {b.shape[0]} vector against {a.shape[0]} rows")
        aug = np.concatenate([a, b[:, None]], axis=1)
        r, pivots = self.rref(aug)
        if a.shape[1] in pivots:
            return None
        x = np.zeros(a.shape[1], dtype=np.int64)
        for row, pc in enumerate(pivots):
            x[pc] = r[row, a.shape[1]]
        return x

    def invert(self, m: np.ndarray) -> np.ndarray | None:
        """Inverse of a square matrix, or None when singular."""
        a = self.array(m)
        n, cols = a.shape
        if n != cols:
            raise ValueError(f"invert requires a square matrix, got {n}x{cols}")
        aug = np.concatenate([a, self.eye(n)], axis=1)
        r, pivots = self.rref(aug)
        if len([c for c in pivots if c < n]) < n:
            return None
        return r[:, n:]

    def solve_all(self, m: np.ndarray, v: np.ndarray) -> tuple[np.ndarray | None, np.ndarray]:
        """Particular solution (or None) together with the kernel basis."""
        return self.membership(m, v), self.kernel_basis(m)

    def in_column_span(self, m: np.ndarray, v: np.ndarray) -> bool:
        return self.membership(m, v) is not None
