"""Exact arithmetic in cyclotomic fields Q(zeta_N).

An element is stored as an integer coefficient vector over a common positive
denominator, reduced modulo the N-th cyclotomic polynomial, so that equality
and the zero test are plain coefficient comparisons.

The engine works at ``N = 4h`` throughout: ``A = zeta_{4h}`` is the skein
parameter, ``q = A**2`` the quantum parameter and ``beta = -[2]_q`` the loop
value.
"""
from __future__ import annotations

import functools
import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import mpmath

Scalar = Union["CycNumber", int, Fraction]


# ---------------------------------------------------------------------------
# polynomial helpers (dense lists, constant term first)

def _poly_divmod(num: list, den: list) -> tuple[list, list]:
    """Long division over Q (or Z when ``den`` is monic)."""
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    lead = den[-1]
    for k in range(len(num) - len(den), -1, -1):
        c = num[k + len(den) - 1]
        if c:
            c = c / lead if lead != 1 else c
            q[k] = c
            for j, dj in enumerate(den):
                num[k + j] -= c * dj
    r = num[: len(den) - 1]
    while r and r[-1] == 0:
        r.pop()
    return q, r


@functools.lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, obtained by dividing x^n - 1 by Phi_d, d | n, d < n."""
    if n < 1:
        raise ValueError("cyclotomic order must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_polynomial(d)))
            assert not rem
    return tuple(int(c) for c in poly)


class _FieldData:
    __slots__ = ("order", "degree", "phi", "power", "reduce_sparse")

    def __init__(self, order: int):
        phi = cyclotomic_polynomial(order)
        d = len(phi) - 1
        self.order = order
        self.degree = d
        self.phi = phi
        # x^k mod Phi for 0 <= k < max(order, 2d - 1)
        power = []
        vec = [0] * d
        vec[0] = 1
        for _ in range(max(order, 2 * d - 1)):
            power.append(tuple(vec))
            top = vec[-1]
            vec = [0] + vec[:-1]
            if top:
                for j in range(d):
                    vec[j] -= top * phi[j]
        self.power = power
        self.reduce_sparse = [
            tuple((j, c) for j, c in enumerate(power[k]) if c) for k in range(len(power))
        ]


@functools.lru_cache(maxsize=None)
def _field(order: int) -> _FieldData:
    return _FieldData(order)


def _as_fraction(c) -> Fraction:
    if isinstance(c, str):
        return Fraction(c)
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    if isinstance(c, Rational):
        return Fraction(c.numerator, c.denominator)
    raise TypeError(f"not a rational coefficient: {c!r}")


class CycNumber:
    """Immutable element of Q(zeta_N)."""

    __slots__ = ("order", "_num", "_den", "_hash")

    def __init__(self, order: int, coeffs: Iterable = ()):
        f = _field(order)
        fr = [_as_fraction(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        acc = [0] * f.degree
        for k, c in enumerate(fr):
            if c:
                n = c.numerator * (den // c.denominator)
                for j, r in f.reduce_sparse[k % order]:
                    acc[j] += n * r
        self._set(order, acc, den)

    # -- construction -----------------------------------------------------
    def _set(self, order: int, num: list, den: int) -> None:
        g = math.gcd(den, *num)
        if g != 1:
            num = [c // g for c in num]
            den //= g
        self.order = order
        self._num = tuple(num)
        self._den = den
        self._hash = None

    @classmethod
    def _raw(cls, order: int, num: list, den: int) -> "CycNumber":
        obj = cls.__new__(cls)
        if den < 0:
            num = [-c for c in num]
            den = -den
        obj._set(order, num, den)
        return obj

    @classmethod
    def zero(cls, order: int) -> "CycNumber":
        return cls._raw(order, [0] * _field(order).degree, 1)

    @classmethod
    def one(cls, order: int) -> "CycNumber":
        return cls.from_rational(order, 1)

    @classmethod
    def from_rational(cls, order: int, value) -> "CycNumber":
        v = _as_fraction(value)
        num = [0] * _field(order).degree
        num[0] = v.numerator
        return cls._raw(order, num, v.denominator)

    @classmethod
    def zeta(cls, order: int, k: int = 1) -> "CycNumber":
        f = _field(order)
        return cls._raw(order, list(f.power[k % order]), 1)

    # -- accessors --------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self._num)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self._den) for c in self._num)

    def is_zero(self) -> bool:
        return not any(self._num)

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def __bool__(self) -> bool:
        return any(self._num)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "CycNumber":
        if isinstance(other, CycNumber):
            if other.order != self.order:
                raise ValueError(
                    f"mixed cyclotomic orders {self.order} and {other.order}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return CycNumber.from_rational(self.order, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self._den == o._den:
            return CycNumber._raw(self.order, [a + b for a, b in zip(self._num, o._num)], self._den)
        da, db = self._den, o._den
        return CycNumber._raw(
            self.order, [a * db + b * da for a, b in zip(self._num, o._num)], da * db
        )

    __radd__ = __add__

    def __neg__(self):
        return CycNumber._raw(self.order, [-a for a in self._num], self._den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            return CycNumber._raw(self.order, [a * other for a in self._num], self._den)
        if isinstance(other, Fraction):
            return CycNumber._raw(
                self.order,
                [a * other.numerator for a in self._num],
                self._den * other.denominator,
            )
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a_nz = [(i, c) for i, c in enumerate(self._num) if c]
        b_nz = [(i, c) for i, c in enumerate(o._num) if c]
        d = len(self._num)
        if not a_nz or not b_nz:
            return CycNumber.zero(self.order)
        conv = [0] * (2 * d - 1)
        for i, ca in a_nz:
            for j, cb in b_nz:
                conv[i + j] += ca * cb
        acc = conv[:d]
        red = _field(self.order).reduce_sparse
        for k in range(d, 2 * d - 1):
            c = conv[k]
            if c:
                for j, r in red[k]:
                    acc[j] += c * r
        return CycNumber._raw(self.order, acc, self._den * o._den)

    __rmul__ = __mul__

    def inverse(self) -> "CycNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        f = _field(self.order)
        if self.is_rational():
            return CycNumber.from_rational(self.order, Fraction(self._den, self._num[0]))
        # extended Euclid: s*a + t*phi = g (a constant)
        a = [Fraction(c) for c in self._num]
        while a and a[-1] == 0:
            a.pop()
        r0, r1 = [Fraction(c) for c in f.phi], a
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        g = r1[0]
        inv = CycNumber(self.order, [c / g for c in s1])
        return inv * self._den

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Fraction(other))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int) -> "CycNumber":
        if n < 0:
            return self.inverse() ** (-n)
        result = CycNumber.one(self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, CycNumber):
            if other.order != self.order:
                raise ValueError(
                    f"mixed cyclotomic orders {self.order} and {other.order}"
                )
            return self._den == other._den and self._num == other._num
        if isinstance(other, (int, Fraction)):
            v = Fraction(other)
            return self.is_rational() and Fraction(self._num[0], self._den) == v
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.order, self._num, self._den))
        return self._hash

    # -- Galois action and embeddings --------------------------------------
    def galois(self, k: int) -> "CycNumber":
        """Apply zeta -> zeta**k (k coprime to the order)."""
        if math.gcd(k, self.order) != 1:
            raise ValueError("Galois exponent must be a unit")
        f = _field(self.order)
        acc = [0] * f.degree
        for i, c in enumerate(self._num):
            if c:
                for j, r in f.reduce_sparse[(i * k) % self.order]:
                    acc[j] += c * r
        return CycNumber._raw(self.order, acc, self._den)

    def conj(self) -> "CycNumber":
        return self.galois(-1)

    def lift(self, order: int) -> "CycNumber":
        """Embed into Q(zeta_order) via zeta_N = zeta_order**(order/N)."""
        if order % self.order:
            raise ValueError(f"{self.order} does not divide {order}")
        step = order // self.order
        f = _field(order)
        acc = [0] * f.degree
        for i, c in enumerate(self._num):
            if c:
                for j, r in f.reduce_sparse[(i * step) % order]:
                    acc[j] += c * r
        return CycNumber._raw(order, acc, self._den)

    def __complex__(self) -> complex:
        w = complex(math.cos(2 * math.pi / self.order), math.sin(2 * math.pi / self.order))
        total = 0j
        p = 1 + 0j
        for c in self._num:
            if c:
                total += c * p
            p *= w
        return total / self._den

    def embed(self, precision: int = 30) -> mpmath.mpc:
        with mpmath.workdps(precision + 5):
            w = mpmath.expjpi(mpmath.mpf(2) / self.order)
            total = mpmath.mpc(0)
            for i, c in enumerate(self._num):
                if c:
                    total += c * w**i
            return total / self._den

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "order": self.order,
            "coeffs": [_fraction_str(Fraction(c, self._den)) for c in self._num],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CycNumber":
        return cls(int(data["order"]), [Fraction(c) for c in data["coeffs"]])

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
                terms.append(f"{c}{'*' + mono if mono else ''}")
        body = " + ".join(terms) if terms else "0"
        return f"CycNumber[{self.order}]({body})"


def _fraction_str(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def _poly_mul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


# ---------------------------------------------------------------------------
# public operations


def cyc_arith(a: CycNumber, b: CycNumber, op: str) -> CycNumber:
    if a.order != b.order:
        raise ValueError(f"mixed cyclotomic orders {a.order} and {b.order}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def field_order(h: int) -> int:
    return 4 * h


def skein_a(h: int) -> CycNumber:
    """A = zeta_{4h}."""
    return CycNumber.zeta(4 * h, 1)


def quantum_q(h: int) -> CycNumber:
    """q = A^2 = zeta_{2h}, seen inside Q(zeta_{4h})."""
    return CycNumber.zeta(4 * h, 2)


def quantum_integer(n: int, h: int) -> CycNumber:
    """[n]_q = q^{n-1} + q^{n-3} + ... + q^{1-n}, with [-n] = -[n]."""
    if h < 2:
        raise ValueError("Coxeter number must be at least 2")
    N = 4 * h
    sign = 1
    if n < 0:
        n, sign = -n, -1
    acc = [0] * N
    for k in range(n):
        acc[(2 * (n - 1 - 2 * k)) % N] += sign
    return CycNumber(N, acc)


def loop_value(h: int) -> CycNumber:
    """beta = -[2]_q."""
    return -quantum_integer(2, h)


def embed_complex(a: CycNumber, precision: int = 15) -> mpmath.mpc:
    return a.embed(precision)


def as_cyc(value: Scalar, order: int) -> CycNumber:
    if isinstance(value, CycNumber):
        if value.order != order:
            raise ValueError(f"mixed cyclotomic orders {value.order} and {order}")
        return value
    return CycNumber.from_rational(order, value)
