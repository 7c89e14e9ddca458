"""Temperley-Lieb diagram calculus TL(beta) with beta = -[2]_q.

A planar ``(m, n)`` diagram has ``m`` bottom (source) points numbered
``0..m-1`` left to right and ``n`` top (target) points numbered ``m..m+n-1``
left to right.  ``tl_compose(f, g)`` stacks ``g`` on top of ``f`` (first
``f``, then ``g``); every closed loop formed contributes a factor ``beta``.

Crossings are skein-expanded as ``sigma+ = A id + A^-1 e`` and
``sigma- = A^-1 id + A e`` with ``A = zeta_{4h}``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable

from .cyclo import CycNumber, loop_value, quantum_integer, skein_a


class PlanarityError(ValueError):
    """A chord matching is not a planar perfect matching."""


# ---------------------------------------------------------------------------
# diagrams


@dataclass(frozen=True)
class PlanarDiagram:
    m: int
    n: int
    partner: tuple  # partner[i] = point matched with point i

    def __post_init__(self):
        size = self.m + self.n
        if size % 2:
            raise PlanarityError("m + n must be even")
        if len(self.partner) != size:
            raise PlanarityError("matching has the wrong size")
        for i, j in enumerate(self.partner):
            if not 0 <= j < size or j == i or self.partner[j] != i:
                raise PlanarityError("not a perfect matching")
        if not _is_planar(self.m, self.n, self.partner):
            raise PlanarityError("chords cross")

    @classmethod
    def from_pairs(cls, m: int, n: int, pairs: Iterable[tuple[int, int]]) -> "PlanarDiagram":
        partner = [-1] * (m + n)
        for a, b in pairs:
            partner[a], partner[b] = b, a
        return cls(m, n, tuple(partner))

    @classmethod
    def _trusted(cls, m: int, n: int, partner: tuple) -> "PlanarDiagram":
        # gluing and juxtaposition preserve planarity; skip re-validation
        d = object.__new__(cls)
        object.__setattr__(d, "m", m)
        object.__setattr__(d, "n", n)
        object.__setattr__(d, "partner", partner)
        return d

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.partner) if i < j]

    def __str__(self) -> str:
        def name(i):
            return f"b{i}" if i < self.m else f"t{i - self.m}"

        return " ".join(f"{name(i)}-{name(j)}" for i, j in self.pairs())


def _is_planar(m: int, n: int, partner: tuple) -> bool:
    # boundary circle: bottom left to right, then top right to left
    circle = list(range(m)) + list(range(m + n - 1, m - 1, -1))
    pos = {p: k for k, p in enumerate(circle)}
    stack: list[int] = []
    for p in circle:
        q = partner[p]
        if pos[q] > pos[p]:
            stack.append(p)
        elif not stack or stack.pop() != q:
            return False
    return True


def identity_diagram(n: int) -> PlanarDiagram:
    return PlanarDiagram(n, n, tuple([i + n for i in range(n)] + list(range(n))))


def _find(parent: list, i: int) -> int:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def glue(f: PlanarDiagram, g: PlanarDiagram) -> tuple[PlanarDiagram, int]:
    """Stack ``g`` on top of ``f``; return the diagram and the number of loops."""
    if f.n != g.m:
        raise ValueError(f"arity mismatch: {f.n} top points against {g.m} bottom points")
    m, k, n = f.m, f.n, g.n
    off = m + k
    size = m + 2 * k + n
    parent = list(range(size))

    def union(a, b):
        ra, rb = _find(parent, a), _find(parent, b)
        if ra != rb:
            parent[ra] = rb

    for i, j in enumerate(f.partner):
        if i < j:
            union(i, j)
    for i, j in enumerate(g.partner):
        if i < j:
            union(off + i, off + j)
    for t in range(k):
        union(m + t, off + t)
    outer = list(range(m)) + list(range(off + k, size))
    label = {p: (p if p < m else p - off - k + m) for p in outer}
    ends: dict = {}
    for p in outer:
        ends.setdefault(_find(parent, p), []).append(label[p])
    partner = [0] * (m + n)
    for a, b in ends.values():
        partner[a], partner[b] = b, a
    roots = {_find(parent, p) for p in range(size)}
    loops = len(roots) - len(ends)
    return PlanarDiagram._trusted(m, n, tuple(partner)), loops


def juxtapose(f: PlanarDiagram, g: PlanarDiagram) -> PlanarDiagram:
    """Place ``g`` to the right of ``f``."""
    m, n = f.m + g.m, f.n + g.n

    def fmap(p):
        return p if p < f.m else p - f.m + m

    def gmap(p):
        return p + f.m if p < g.m else p - g.m + m + f.n

    partner = [0] * (m + n)
    for i, j in enumerate(f.partner):
        partner[fmap(i)] = fmap(j)
    for i, j in enumerate(g.partner):
        partner[gmap(i)] = gmap(j)
    return PlanarDiagram._trusted(m, n, tuple(partner))


# ---------------------------------------------------------------------------
# morphisms


class TLMorphism:
    """Linear combination of planar (m, n) diagrams with CycNumber coefficients."""

    __slots__ = ("m", "n", "h", "terms")

    def __init__(self, m: int, n: int, h: int, terms: dict | None = None):
        self.m, self.n, self.h = m, n, h
        clean = {}
        for d, c in (terms or {}).items():
            if (d.m, d.n) != (m, n):
                raise ValueError("diagram arity differs from the morphism")
            if c:
                clean[d] = c
        self.terms = clean

    @property
    def order(self) -> int:
        return 4 * self.h

    def _check(self, other: "TLMorphism"):
        if (self.m, self.n, self.h) != (other.m, other.n, other.h):
            raise ValueError("morphisms have different shapes or levels")

    def __add__(self, other: "TLMorphism") -> "TLMorphism":
        self._check(other)
        out = dict(self.terms)
        for d, c in other.terms.items():
            out[d] = out[d] + c if d in out else c
        return TLMorphism(self.m, self.n, self.h, out)

    def __neg__(self) -> "TLMorphism":
        return TLMorphism(self.m, self.n, self.h, {d: -c for d, c in self.terms.items()})

    def __sub__(self, other: "TLMorphism") -> "TLMorphism":
        return self + (-other)

    def scale(self, s) -> "TLMorphism":
        if not isinstance(s, CycNumber):
            s = CycNumber.from_rational(self.order, s)
        return TLMorphism(self.m, self.n, self.h, {d: c * s for d, c in self.terms.items()})

    def __rmul__(self, s) -> "TLMorphism":
        return self.scale(s)

    def __matmul__(self, other: "TLMorphism") -> "TLMorphism":
        """``g @ f`` is the composite g o f (f first)."""
        return tl_compose(other, self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TLMorphism):
            return NotImplemented
        return (self.m, self.n, self.h) == (other.m, other.n, other.h) and self.terms == other.terms

    def __hash__(self):
        return hash((self.m, self.n, self.h, frozenset(self.terms.items())))

    def coefficient(self, d: PlanarDiagram) -> CycNumber:
        return self.terms.get(d, CycNumber.zero(self.order))

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        return f"TLMorphism({self.m}->{self.n}, h={self.h}, {len(self.terms)} terms)"

    def pretty(self) -> str:
        return "\n".join(f"{c!r} * [{d}]" for d, c in sorted(self.terms.items(), key=lambda t: t[0].partner))


def tl_compose(f: TLMorphism, g: TLMorphism) -> TLMorphism:
    """First ``f``, then ``g``: ``f: m -> k``, ``g: k -> n`` gives ``m -> n``."""
    if f.n != g.m:
        raise ValueError(f"arity mismatch: {f.m}->{f.n} then {g.m}->{g.n}")
    if f.h != g.h:
        raise ValueError("morphisms live at different levels")
    beta = loop_value(f.h)
    powers = [CycNumber.one(f.order)]
    out: dict = {}
    for df, cf in f.terms.items():
        for dg, cg in g.terms.items():
            d, loops = glue(df, dg)
            while len(powers) <= loops:
                powers.append(powers[-1] * beta)
            c = cf * cg * powers[loops]
            out[d] = out[d] + c if d in out else c
    return TLMorphism(f.m, g.n, f.h, out)


def tl_tensor(f: TLMorphism, g: TLMorphism) -> TLMorphism:
    if f.h != g.h:
        raise ValueError("morphisms live at different levels")
    out: dict = {}
    for df, cf in f.terms.items():
        for dg, cg in g.terms.items():
            d = juxtapose(df, dg)
            c = cf * cg
            out[d] = out[d] + c if d in out else c
    return TLMorphism(f.m + g.m, f.n + g.n, f.h, out)


def identity(n: int, h: int) -> TLMorphism:
    return TLMorphism(n, n, h, {identity_diagram(n): CycNumber.one(4 * h)})


def e_generator(k: int, n: int, h: int) -> TLMorphism:
    """``e_k`` on ``n`` strands: cap on strands k, k+1 followed by a cup (1-based)."""
    if not 1 <= k <= n - 1:
        raise ValueError(f"e_{k} undefined on {n} strands")
    pairs = [(i, n + i) for i in range(n) if i not in (k - 1, k)]
    pairs += [(k - 1, k), (n + k - 1, n + k)]
    return TLMorphism(n, n, h, {PlanarDiagram.from_pairs(n, n, pairs): CycNumber.one(4 * h)})


def cup(n: int, k: int, h: int) -> TLMorphism:
    """``n -> n+2``: a cup inserted after the first ``k`` strands."""
    if not 0 <= k <= n:
        raise ValueError(f"cup after {k} strands undefined on {n} strands")
    pairs = []
    for i in range(n):
        pairs.append((i, n + (i if i < k else i + 2)))
    pairs.append((n + k, n + k + 1))
    return TLMorphism(n, n + 2, h, {PlanarDiagram.from_pairs(n, n + 2, pairs): CycNumber.one(4 * h)})


def cap(n: int, k: int, h: int) -> TLMorphism:
    """``n -> n-2``: a cap on strands k, k+1 (1-based)."""
    if not 1 <= k <= n - 1:
        raise ValueError(f"cap_{k} undefined on {n} strands")
    pairs = [(k - 1, k)]
    for i in range(n):
        if i in (k - 1, k):
            continue
        pairs.append((i, n + (i if i < k - 1 else i - 2)))
    return TLMorphism(n, n - 2, h, {PlanarDiagram.from_pairs(n, n - 2, pairs): CycNumber.one(4 * h)})


@functools.lru_cache(maxsize=None)
def jones_wenzl(n: int, h: int) -> TLMorphism:
    """Jones-Wenzl idempotent on ``n`` strands, ``0 <= n <= h - 1``.

    Recursion ``p_{k+1} = (p_k x 1) + ([k]/[k+1]) (p_k x 1) e_k (p_k x 1)``;
    with ``beta = -[2]`` this gives ``p_2 = id + e/[2]``, the idempotent
    killed by ``e``.
    """
    if not 0 <= n <= h - 1:
        raise ValueError(f"no Jones-Wenzl projector on {n} strands at h = {h}")
    if n <= 1:
        return identity(n, h)
    prev = tl_tensor(jones_wenzl(n - 1, h), identity(1, h))
    coef = quantum_integer(n - 1, h) / quantum_integer(n, h)
    middle = tl_compose(tl_compose(prev, e_generator(n - 1, n, h)), prev)
    return prev + middle.scale(coef)


def crossing(sign: int | str, h: int) -> TLMorphism:
    """Skein expansion of the positive (``+``) or negative (``-``) crossing."""
    s = _sign(sign)
    a = skein_a(h)
    lead, other = (a, a.inverse()) if s > 0 else (a.inverse(), a)
    return identity(2, h).scale(lead) + e_generator(1, 2, h).scale(other)


def _sign(sign) -> int:
    if sign in ("+", 1, +1):
        return 1
    if sign in ("-", -1):
        return -1
    raise ValueError(f"crossing sign must be + or -, got {sign!r}")


def crossing_at(k: int, n: int, sign, h: int) -> TLMorphism:
    """Crossing of strands k, k+1 (1-based) inside ``n`` strands."""
    return tl_tensor(tl_tensor(identity(k - 1, h), crossing(sign, h)), identity(n - k - 1, h))


def _e_on_top(d: PlanarDiagram, k: int) -> tuple[PlanarDiagram, int]:
    """Stack e_k (1-based) on top of a diagram without general gluing."""
    s, t = d.m + k - 1, d.m + k
    if d.partner[s] == t:
        return d, 1
    a, b = d.partner[s], d.partner[t]
    partner = list(d.partner)
    partner[a], partner[b] = b, a
    partner[s], partner[t] = t, s
    return PlanarDiagram._trusted(d.m, d.n, tuple(partner)), 0


def apply_crossing(f: TLMorphism, k: int, sign) -> TLMorphism:
    """``sigma_k o f`` computed term-by-term without building the full crossing."""
    s = _sign(sign)
    a = skein_a(f.h)
    lead, other = (a, a.inverse()) if s > 0 else (a.inverse(), a)
    other_loop = other * loop_value(f.h)
    out: dict = {}
    for d, c in f.terms.items():
        c1 = c * lead
        out[d] = out[d] + c1 if d in out else c1
        d2, loops = _e_on_top(d, k)
        c2 = c * (other_loop if loops else other)
        out[d2] = out[d2] + c2 if d2 in out else c2
    return TLMorphism(f.m, f.n, f.h, out)


def braid_word(m: int, n: int) -> list[int]:
    """Crossing positions (1-based, first acts first) moving m left strands past n right ones."""
    word = []
    for i in range(m, 0, -1):  # rightmost of the m strands moves first
        for j in range(n):
            word.append(i + j)
    return word


def braid_bundle(f: TLMorphism, m: int, n: int, sign, offset: int = 0) -> TLMorphism:
    """Post-compose with the crossing of an m-bundle over/under an n-bundle.

    With ``sign = +`` every elementary crossing is positive.
    """
    for k in braid_word(m, n):
        f = apply_crossing(f, offset + k, sign)
    return f


def markov_trace(f: TLMorphism) -> CycNumber:
    """Close every strand on the right; each loop is worth beta."""
    if f.m != f.n:
        raise ValueError("markov trace needs an endomorphism")
    n = f.n
    beta = loop_value(f.h)
    total = CycNumber.zero(f.order)
    for d, c in f.terms.items():
        parent = list(range(2 * n))
        for i, j in enumerate(d.partner):
            ri, rj = _find(parent, i), _find(parent, j)
            if ri != rj:
                parent[ri] = rj
        for t in range(n):
            ri, rj = _find(parent, t), _find(parent, n + t)
            if ri != rj:
                parent[ri] = rj
        loops = len({_find(parent, p) for p in range(2 * n)})
        total = total + c * beta ** loops
    return total


def _check_label(a: int, h: int):
    if not 1 <= a <= h - 1:
        raise ValueError(f"label {a} outside 1..{h - 1}")


def hopf_link(a: int, b: int, h: int) -> CycNumber:
    """Hopf link coloured by the simples a, b (a = image of p_{a-1})."""
    _check_label(a, h)
    _check_label(b, h)
    m, n = a - 1, b - 1
    f = tl_tensor(jones_wenzl(m, h), jones_wenzl(n, h))
    f = braid_bundle(f, m, n, "+")
    f = braid_bundle(f, n, m, "+")
    return markov_trace(f)


def curl_scalar(a: int, h: int) -> CycNumber:
    """Scalar of a positive curl on the simple a.

    A curl on an n-cable is the positive full twist of the n strands followed
    by one curl on each strand.  Every non-identity diagram of TL_n is killed
    by p_n, so the scalar is (-A^3)^n times the identity coefficient of the
    full twist.  Stacking generators on top never raises the number of
    through-strands, so terms that lose one are dropped as they appear.
    """
    _check_label(a, h)
    n = a - 1
    if n == 0:
        return CycNumber.one(4 * h)
    f = full_twist(n, h, identity_only=True)
    single = -(skein_a(h) ** 3)
    return f.coefficient(identity_diagram(n)) * single ** n


def full_twist(n: int, h: int, identity_only: bool = False) -> TLMorphism:
    """Skein expansion of the positive full twist on ``n`` strands.

    With ``identity_only`` only the identity term is propagated.
    """
    ident = identity_diagram(n)
    f = identity(n, h)
    for _ in range(n):
        for k in range(n - 1, 0, -1):
            f = apply_crossing(f, k, "+")
            if identity_only:
                f = TLMorphism(n, n, h, {d: c for d, c in f.terms.items() if d == ident})
    return f


def curl_scalar_by_closure(a: int, h: int) -> CycNumber:
    """Independent route: close c_{n,n} o (p_n x p_n) and divide by d(a).

    The closure is the n-coloured unknot with one positive curl.  Cost grows
    with the square of the Jones-Wenzl expansion; meant for small h.
    """
    _check_label(a, h)
    n = a - 1
    if n == 0:
        return CycNumber.one(4 * h)
    f = tl_tensor(jones_wenzl(n, h), jones_wenzl(n, h))
    f = braid_bundle(f, n, n, "+")
    return markov_trace(f) / markov_trace(jones_wenzl(n, h))


def curl_on_strand(sign, h: int) -> TLMorphism:
    """(1 x cap)(sigma x 1)(1 x cup) on one strand."""
    f = cup(1, 1, h)
    f = tl_compose(f, crossing_at(1, 3, sign, h))
    return tl_compose(f, cap(3, 2, h))
