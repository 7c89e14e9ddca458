# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Row echelon elimination over F_p for p < 2**31."""
import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t i64


cdef inline i64 _inv(i64 a, i64 p) nogil:
    cdef i64 t = 0, newt = 1, r = p, newr = a % p, q, tmp
    while newr != 0:
        q = r // newr
        tmp = t - q * newt; t = newt; newt = tmp
        tmp = r - q * newr; r = newr; newr = tmp
    if t < 0:
        t += p
    return t


def echelon_modp(cnp.ndarray[i64, ndim=2] mat, i64 p):
    """Reduce a copy of ``mat`` to row echelon form modulo ``p``.

    Returns ``(rank, pivot_cols, pivot_rows)`` where ``pivot_rows`` are the
    original indices of rows that carried a pivot.
    """
    cdef cnp.ndarray[i64, ndim=2] m = np.mod(mat, p).astype(np.int64)
    cdef Py_ssize_t nrows = m.shape[0], ncols = m.shape[1]
    cdef cnp.ndarray[i64, ndim=1] order = np.arange(nrows, dtype=np.int64)
    cdef i64[:, ::1] mv = np.ascontiguousarray(m)
    cdef i64[::1] ov = order
    cdef Py_ssize_t rank = 0, col, r, c, piv
    cdef i64 inv, f, tmp
    pivot_cols = []
    with nogil:
        for col in range(ncols):
            if rank == nrows:
                break
            piv = -1
            for r in range(rank, nrows):
                if mv[r, col] != 0:
                    piv = r
                    break
            if piv < 0:
                continue
            if piv != rank:
                for c in range(ncols):
                    tmp = mv[piv, c]; mv[piv, c] = mv[rank, c]; mv[rank, c] = tmp
                tmp = ov[piv]; ov[piv] = ov[rank]; ov[rank] = tmp
            inv = _inv(mv[rank, col], p)
            for c in range(col, ncols):
                mv[rank, c] = (mv[rank, c] * inv) % p
            for r in range(rank + 1, nrows):
                f = mv[r, col]
                if f != 0:
                    for c in range(col, ncols):
                        mv[r, c] = (mv[r, c] - f * mv[rank, c]) % p
                        if mv[r, c] < 0:
                            mv[r, c] += p
            with gil:
                pivot_cols.append(col)
            rank += 1
    return rank, pivot_cols, [int(order[i]) for i in range(rank)]
