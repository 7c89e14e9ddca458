"""Linear algebra backends over Q(zeta_N): certified exact and float.

Both backends expose the same surface: scalar conversion, ``kernel`` (a basis
of the nullspace together with a coordinate reader for vectors in the span of
that basis) and ``rank``.  Matrices are passed as lists of sparse rows
``{column: scalar}``.

The exact backend runs the elimination modulo a prime ``p = 1 (mod N)``
(through the compiled kernel when available) to choose pivots, then solves
the pivot system in exact cyclotomic arithmetic and checks every kernel
vector against every row.  Rank over F_p never exceeds the rank over
Q(zeta_N), so a verified kernel of dimension ``ncols - rank_p`` certifies the
exact nullity.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._kernels import echelon_modp
from .cyclo import CycNumber

SparseRow = dict


class RankAmbiguityError(RuntimeError):
    """A singular value fell too close to the float rank threshold."""


# ---------------------------------------------------------------------------
# primes and reduction mod p


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13):
        if n % small == 0:
            return n == small
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


@functools.lru_cache(maxsize=None)
def split_primes(order: int, count: int = 4) -> tuple[tuple[int, int], ...]:
    """Primes p = 1 (mod order) below 2**31 with a primitive order-th root."""
    found = []
    p = (2**31 - 1) // order * order + 1
    while len(found) < count:
        p -= order
        if not _is_prime(p):
            continue
        factors = _prime_factors(p - 1)
        g = 2
        while any(pow(g, (p - 1) // f, p) == 1 for f in factors):
            g += 1
        found.append((p, pow(g, (p - 1) // order, p)))
    return tuple(found)


class _Reducer:
    def __init__(self, order: int, p: int, omega: int):
        from .cyclo import _field

        self.p = p
        d = _field(order).degree
        self.powers = [pow(omega, k, p) for k in range(d)]

    def __call__(self, x: CycNumber) -> int:
        p = self.p
        den = x._den % p
        if den == 0:
            raise ZeroDivisionError("denominator divisible by the modulus")
        s = 0
        for c, w in zip(x._num, self.powers):
            if c:
                s += c * w
        return s % p * pow(den, p - 2, p) % p


# ---------------------------------------------------------------------------


@dataclass
class Kernel:
    """Nullspace basis (dense columns) and a reader for vectors in its span."""

    ncols: int
    basis: list
    read: Callable[[Sequence], list]
    free: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)


class ExactBackend:
    name = "exact"
    tolerance = None

    def __init__(self, order: int):
        self.order = order
        self.zero = CycNumber.zero(order)
        self.one = CycNumber.one(order)
        self._reducers = [_Reducer(order, p, w) for p, w in split_primes(order)]
        self.gaps: list = []

    def scalar(self, x) -> CycNumber:
        if isinstance(x, CycNumber):
            if x.order == self.order:
                return x
            return x.lift(self.order)
        return CycNumber.from_rational(self.order, x)

    @staticmethod
    def is_zero(x) -> bool:
        return not x

    def equal(self, a, b) -> bool:
        return a == b

    # -- elimination ----------------------------------------------------
    def _modular(self, rows: list, ncols: int, attempt: int):
        red = self._reducers[attempt]
        mat = np.zeros((len(rows), ncols), dtype=np.int64)
        for i, row in enumerate(rows):
            for j, v in row.items():
                mat[i, j] = red(v)
        return echelon_modp(mat, red.p)

    def kernel(self, rows: list, ncols: int) -> Kernel:
        rows = [r for r in rows if r]
        if not rows:
            basis = []
            for j in range(ncols):
                v = [self.zero] * ncols
                v[j] = self.one
                basis.append(v)
            return Kernel(ncols, basis, lambda vec: list(vec), list(range(ncols)))
        for attempt in range(len(self._reducers)):
            try:
                rank, pcols, prows = self._modular(rows, ncols, attempt)
            except ZeroDivisionError:
                continue
            if rank == ncols:
                return Kernel(ncols, [], lambda vec: [], [])
            basis, free = self._lift(rows, ncols, pcols, prows)
            if basis is not None:
                return Kernel(ncols, basis, _reader(free), free)
        return self._kernel_direct(rows, ncols)

    def _lift(self, rows, ncols, pcols, prows):
        """Solve the pivot block exactly and verify against all rows."""
        free = [j for j in range(ncols) if j not in set(pcols)]
        r = len(pcols)
        # augmented system [M[R,P] | -M[R,F]]
        pos = {c: k for k, c in enumerate(pcols)}
        fpos = {c: k for k, c in enumerate(free)}
        aug = []
        for i in prows:
            left = [self.zero] * r
            right = [self.zero] * len(free)
            for j, v in rows[i].items():
                if j in pos:
                    left[pos[j]] = v
                else:
                    right[fpos[j]] = -v
            aug.append(left + right)
        sol = _gauss_jordan(aug, r, self.zero)
        if sol is None:
            return None, free
        basis = []
        for k, fcol in enumerate(free):
            v = [self.zero] * ncols
            v[fcol] = self.one
            for t, pc in enumerate(pcols):
                v[pc] = sol[t][r + k]
            basis.append(v)
        for row in rows:
            for v in basis:
                acc = self.zero
                for j, c in row.items():
                    if v[j]:
                        acc = acc + c * v[j]
                if acc:
                    return None, free
        return basis, free

    def _kernel_direct(self, rows, ncols) -> Kernel:
        dense = []
        for row in rows:
            d = [self.zero] * ncols
            for j, v in row.items():
                d[j] = v
            dense.append(d)
        red, pcols = _rref(dense, ncols, self.zero)
        free = [j for j in range(ncols) if j not in set(pcols)]
        basis = []
        for fcol in free:
            v = [self.zero] * ncols
            v[fcol] = self.one
            for t, pc in enumerate(pcols):
                v[pc] = -red[t][fcol]
            basis.append(v)
        return Kernel(ncols, basis, _reader(free), free)

    def rank(self, rows: list, ncols: int) -> int:
        return ncols - self.kernel(rows, ncols).dim

    def solve_square(self, mat: list, rhs: list) -> list:
        """Solve ``mat @ X = rhs`` exactly (``rhs`` a list of columns)."""
        n = len(mat)
        aug = [list(mat[i]) + [col[i] for col in rhs] for i in range(n)]
        sol = _gauss_jordan(aug, n, self.zero)
        if sol is None:
            raise ZeroDivisionError("singular system")
        return [[sol[i][n + k] for i in range(n)] for k in range(len(rhs))]


def _reader(free: list) -> Callable:
    def read(vec):
        return [vec[j] for j in free]

    return read


def _gauss_jordan(aug: list, r: int, zero) -> list | None:
    """Gauss-Jordan on the first ``r`` columns of a square-left augmented matrix."""
    m = [list(row) for row in aug]
    for c in range(r):
        piv = next((i for i in range(c, r) if m[i][c]), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        inv = m[c][c].inverse()
        m[c] = [v * inv if v else v for v in m[c]]
        for i in range(r):
            if i != c and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b if b else a for a, b in zip(m[i], m[c])]
    return m


def _rref(dense: list, ncols: int, zero) -> tuple[list, list]:
    m = [list(r) for r in dense]
    pcols, rank = [], 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = m[rank][c].inverse()
        m[rank] = [v * inv if v else v for v in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b if b else a for a, b in zip(m[i], m[rank])]
        pcols.append(c)
        rank += 1
    return m[:rank], pcols


class FloatBackend:
    """complex128 arithmetic; ranks by relative singular-value threshold."""

    name = "float"

    def __init__(self, order: int, tolerance: float = 1e-6):
        self.order = order
        self.tolerance = tolerance
        self.zero = 0j
        self.one = 1 + 0j
        self.gaps: list = []

    def scalar(self, x) -> complex:
        return complex(x)

    def is_zero(self, x) -> bool:
        return abs(x) < 1e-12

    def equal(self, a, b) -> bool:
        return abs(a - b) <= 1e-9 * max(1.0, abs(a), abs(b))

    def _rank_of(self, s: np.ndarray, label: str = "") -> int:
        if s.size == 0 or s[0] == 0:
            return 0
        rel = s / s[0]
        tol = self.tolerance
        ambiguous = rel[(rel > tol / 10) & (rel < tol * 10)]
        if ambiguous.size:
            raise RankAmbiguityError(
                f"singular values {ambiguous.tolist()} within a decade of tolerance {tol}"
            )
        rank = int(np.count_nonzero(rel > tol))
        kept = float(rel[rank - 1]) if rank else None
        dropped = float(rel[rank]) if rank < rel.size else None
        self.gaps.append({"label": label, "min_kept": kept, "max_dropped": dropped})
        return rank

    def kernel(self, rows: list, ncols: int, label: str = "") -> Kernel:
        mat = np.zeros((max(len(rows), 1), ncols), dtype=complex)
        for i, row in enumerate(rows):
            for j, v in row.items():
                mat[i, j] = v
        if ncols == 0:
            return Kernel(0, [], lambda vec: [])
        _, s, vh = np.linalg.svd(mat, full_matrices=True)
        rank = self._rank_of(s, label)
        null = vh[rank:].conj().T
        basis = [list(null[:, k]) for k in range(null.shape[1])]
        adj = null.conj().T

        def read(vec):
            return list(adj @ np.asarray(vec, dtype=complex))

        return Kernel(ncols, basis, read)

    def rank(self, rows: list, ncols: int, label: str = "") -> int:
        return ncols - self.kernel(rows, ncols, label).dim

    def solve_square(self, mat: list, rhs: list) -> list:
        a = np.asarray(mat, dtype=complex)
        b = np.asarray(rhs, dtype=complex).T
        return list(np.linalg.solve(a, b).T)


def make_backend(name: str, order: int, tolerance: float | None = None):
    if name == "exact":
        return ExactBackend(order)
    if name == "float":
        return FloatBackend(order, 1e-6 if tolerance is None else tolerance)
    raise ValueError(f"unknown backend {name!r}")
