"""Brute-force exactness oracle: the free modules as plain k-vector spaces.

Each R^b is modelled as k^(b*(1+n+d)) and a linear-entry matrix becomes one
big scalar matrix; exactness is then an honest kernel/image comparison with
no reference to the graded shortcuts used by the package.
"""

import numpy as np

from tacx.complexes import LinearMatrix, PeriodicComplex


def full_linear_model(m: LinearMatrix) -> np.ndarray:
    """The matrix of m on total coordinates (scalar | degree 1 | degree 2)."""
    alg = m.algebra
    n, d, p = alg.n, alg.d, alg.p
    unit = 1 + n + d
    out = np.zeros((m.rows * unit, m.cols * unit), dtype=np.int64)
    for i in range(m.rows):
        for j in range(m.cols):
            e = m.entries[i, j]
            block = np.zeros((unit, unit), dtype=np.int64)
            block[1 : 1 + n, 0] = e  # scalar -> degree 1
            block[1 + n :, 1 : 1 + n] = alg.multiplication_map(e)  # degree 1 -> 2
            out[i * unit : (i + 1) * unit, j * unit : (j + 1) * unit] = block
    return out % p


def oracle_exact_at(c: PeriodicComplex, i: int) -> bool:
    q = c.period
    outgoing = full_linear_model(c.maps[(i - 1) % q])
    incoming = full_linear_model(c.maps[i])
    fld = c.algebra.field
    if (outgoing @ incoming % c.algebra.p).any():
        raise AssertionError("oracle fed a non-complex")
    kernel_dim = incoming.shape[0] - fld.rank(outgoing)
    return kernel_dim == fld.rank(incoming)
