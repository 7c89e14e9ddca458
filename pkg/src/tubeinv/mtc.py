"""Closed-form modular data of the Temperley-Lieb quotient at Coxeter number h.

Labels are ``1..h-1`` (label ``a`` is the image of the projector on ``a-1``
strands).  With loop value ``beta = -[2]_q`` the dimensions are
``d(a) = (-1)^(a-1) [a]_q``, the unnormalized S-matrix (Hopf link) is
``S_ab = (-1)^(a+b) [ab]_q`` and the twist is ``T_a = (-1)^(a-1) A^(a^2-1)``.
T is the curl scalar itself; only ratios of its entries carry meaning.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

from .cyclo import CycNumber, embed_complex, quantum_integer, skein_a

#: sign realized by verlinde_character(m, 2, h) = VERLINDE_SIGN * 2 cos(pi m / h)
VERLINDE_SIGN = -1


def _check_h(h: int):
    if not isinstance(h, int) or h < 3:
        raise ValueError(f"Coxeter number must be an integer >= 3, got {h!r}")


def _check_labels(h: int, *labels: int):
    for a in labels:
        if not 1 <= a <= h - 1:
            raise ValueError(f"label {a} outside 1..{h - 1}")


def quantum_dimension(a: int, h: int) -> CycNumber:
    return quantum_integer(a, h) * (-1) ** (a - 1)


def s_entry(a: int, b: int, h: int) -> CycNumber:
    return quantum_integer(a * b, h) * (-1) ** (a + b)


def t_entry(a: int, h: int) -> CycNumber:
    return skein_a(h) ** (a * a - 1) * (-1) ** (a - 1)


def fusion_mult(a: int, b: int, c: int, h: int) -> int:
    """Truncated Clebsch-Gordan rule for 1-based labels."""
    _check_h(h)
    _check_labels(h, a, b, c)
    if (a + b + c) % 2 == 0:
        return 0
    return int(abs(a - b) < c < min(a + b, 2 * h - a - b))


def global_dim(h: int) -> CycNumber:
    _check_h(h)
    total = CycNumber.zero(4 * h)
    for a in range(1, h):
        d = quantum_dimension(a, h)
        total = total + d * d
    return total


@dataclass(frozen=True, eq=False)
class ModularData:
    h: int
    labels: tuple
    d: tuple
    S: tuple
    T: tuple
    fusion: tuple
    global_dim: CycNumber

    def to_json(self, precision: int = 12) -> dict:
        def num(x: CycNumber) -> dict:
            z = embed_complex(x, precision)
            return {"exact": x.to_json()["coeffs"], "re": _round(z.real, precision), "im": _round(z.imag, precision)}

        return {
            "h": self.h,
            "labels": list(self.labels),
            "order": 4 * self.h,
            "d": [num(x) for x in self.d],
            "abs_d": [_round(abs(complex(x)), precision) for x in self.d],
            "S": [[num(x) for x in row] for row in self.S],
            "T": [num(x) for x in self.T],
            "fusion": [[[n for n in row] for row in plane] for plane in self.fusion],
            "global_dim": num(self.global_dim),
        }


def _round(v: float, precision: int) -> float:
    r = round(v, precision)
    return 0.0 if r == 0 else r


@functools.lru_cache(maxsize=None)
def modular_data(h: int) -> ModularData:
    _check_h(h)
    labels = tuple(range(1, h))
    d = tuple(quantum_dimension(a, h) for a in labels)
    S = tuple(tuple(s_entry(a, b, h) for b in labels) for a in labels)
    T = tuple(t_entry(a, h) for a in labels)
    fusion = tuple(
        tuple(tuple(fusion_mult(a, b, c, h) for c in labels) for b in labels) for a in labels
    )
    return ModularData(h, labels, d, S, T, fusion, global_dim(h))


def verlinde_character(m: int, a: int, h: int) -> CycNumber:
    """chi_m(a) = S_am / S_1m, the weight of [a] on the m-th idempotent of K(C)."""
    _check_h(h)
    _check_labels(h, m, a)
    return s_entry(a, m, h) / s_entry(1, m, h)


def verlinde_fusion(a: int, b: int, c: int, h: int) -> CycNumber:
    """N_ab^c from the Verlinde formula (labels are self-dual, S is real)."""
    md = modular_data(h)
    total = CycNumber.zero(4 * h)
    for m in range(h - 1):
        total = total + md.S[a - 1][m] * md.S[b - 1][m] * md.S[c - 1][m] / md.S[0][m]
    return total / md.global_dim


# ---------------------------------------------------------------------------
# invariance


@dataclass
class InvarianceReport:
    h: int
    commutes_with_T: bool
    commutes_with_S: bool
    haploid: bool
    dim_condition: bool
    s_defect: CycNumber | None = None
    t_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.commutes_with_T and self.commutes_with_S and self.haploid and self.dim_condition

    def to_json(self) -> dict:
        out = {
            "T": self.commutes_with_T,
            "S": self.commutes_with_S,
            "haploid": self.haploid,
            "dim_condition": self.dim_condition,
        }
        if self.s_defect is not None:
            out["s_defect"] = {
                "exact": self.s_defect.to_json()["coeffs"],
                "value": _round(complex(self.s_defect).real, 12),
            }
        return out


def _matmul(a, b, zero):
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = zero
            for t in range(k):
                if a[i][t] and b[t][j]:
                    acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def invariance_report(Z, h: int) -> InvarianceReport:
    """Exact checks of a candidate multiplicity matrix against S, T and d."""
    md = modular_data(h)
    n = h - 1
    if len(Z) != n or any(len(row) != n for row in Z):
        raise ValueError(f"Z must be {n}x{n} at h = {h}")
    if any(int(z) != z or z < 0 for row in Z for z in row):
        raise ValueError("Z must have non-negative integer entries")
    order = 4 * h
    zero = CycNumber.zero(order)
    Zc = [[CycNumber.from_rational(order, int(z)) for z in row] for row in Z]
    t_viol = [
        (a + 1, b + 1)
        for a in range(n)
        for b in range(n)
        if Z[a][b] and md.T[a] != md.T[b]
    ]
    S = [list(r) for r in md.S]
    SZ = _matmul(S, Zc, zero)
    ZS = _matmul(Zc, S, zero)
    commutes_S = SZ == ZS
    dim_total = zero
    for a in range(n):
        for b in range(n):
            if Z[a][b]:
                dim_total = dim_total + md.d[a] * md.d[b] * int(Z[a][b])
    defect = None
    if not commutes_S:
        # S^-1 = S / d(C) because S^2 = d(C) I
        szs = zero
        for b in range(n):
            szs = szs + SZ[0][b] * S[b][0]
        defect = szs / md.global_dim
    return InvarianceReport(
        h,
        commutes_with_T=not t_viol,
        commutes_with_S=commutes_S,
        haploid=Z[0][0] == 1,
        dim_condition=dim_total == md.global_dim,
        s_defect=defect,
        t_violations=t_viol,
    )
