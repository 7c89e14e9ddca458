"""Pure numpy fallback for the F_p echelon kernel."""
from __future__ import annotations

import numpy as np


def echelon_modp(mat: np.ndarray, p: int) -> tuple[int, list[int], list[int]]:
    """Reduce a copy of ``mat`` to row echelon form modulo ``p``.

    Returns ``(rank, pivot_cols, pivot_rows)``; ``pivot_rows`` are original row
    indices.  Rows are updated as whole vectors, so the cost is dominated by
    numpy broadcasting rather than the Python loop over columns.
    """
    m = np.mod(np.asarray(mat, dtype=np.int64), p)
    nrows, ncols = m.shape
    order = np.arange(nrows)
    rank = 0
    pivot_cols: list[int] = []
    for col in range(ncols):
        if rank == nrows:
            break
        nz = np.nonzero(m[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            m[[rank, piv]] = m[[piv, rank]]
            order[[rank, piv]] = order[[piv, rank]]
        inv = pow(int(m[rank, col]), p - 2, p)
        m[rank, col:] = (m[rank, col:] * inv) % p
        below = m[rank + 1 :, col].copy()
        hit = np.nonzero(below)[0]
        if hit.size:
            rows = rank + 1 + hit
            m[rows, col:] = (m[rows, col:] - np.outer(below[hit], m[rank, col:]) % p) % p
        pivot_cols.append(col)
        rank += 1
    return rank, pivot_cols, [int(i) for i in order[:rank]]
