"""The Frobenius algebra TM at small Coxeter number, verified exactly.

Elements of ``TM_X^Y`` are graded functionals on closed chains
``(v0, x, v1, y, v0)`` with ``x`` a basis vector of ``E_{X-1}(v0, v1)`` and
``y`` of ``E_{Y-1}(v1, v0)``; they are the functionals fixed by the
encircling average

    project_tm = (1/d(C)) sum_s d(s) encircle_s .

Everything runs in essential coordinates: a chain of coloured bundles is
``(v0, r1, v1, r2, ..., rn, vn)`` with ``r_t`` indexing ``E_{l_t}(v_{t-1},
v_t)``.  The local pieces (bundle crossings, coloured cups and caps,
trivalent vertices) are computed once from short path vectors and then
composed on chains.

Conventions fixed by exact checks (see ``layering``):

* ``encircle_s`` creates the ``s``-coloured loop on the left, moves its
  right leg past the X bundle with elementary crossings of sign ``+`` and
  past the Y bundle with sign ``-``, evaluates the functional in the middle
  and closes the loop;
* the product reorders ``X A Y B`` into ``X Y A B`` by moving A past Y with
  negative crossings;
* the pairing moves the Y bundle of its second argument right past X with
  positive crossings (the inverse of the reorder);
* the braiding used for commutativity is positive on the X side and
  negative on the Y side.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

from .alphainv import BraidTable, tm_basis
from .cyclo import CycNumber
from .mtc import fusion_mult, invariance_report, modular_data
from .quivmod import ADEQuiver, _cap_pair, _cup_pair, end_vertex, nested_cup, tower

#: elementary crossing signs realizing the conventions listed above
ENCIRCLE_SIGNS = (+1, -1)
REORDER_SIGN = -1
PAIRING_SIGN = +1
COMMUTE_SIGNS = (+1, -1)


class FrobeniusLimitError(ValueError):
    """The Frobenius verification is exact-only and limited to small h."""


MAX_H = 6


# ---------------------------------------------------------------------------
# local pieces


class TubeCalculus:
    """Local pieces in essential coordinates for one quiver (exact)."""

    def __init__(self, q: ADEQuiver):
        self.q = q
        self.t = tower(q, "exact")
        self.back = self.t.back
        self.ops = self.t.ops
        self.braid = {+1: BraidTable(self.t, +1), -1: BraidTable(self.t, -1)}
        self.zero, self.one = self.back.zero, self.back.one
        self._cross: dict = {}

    # dimensions ---------------------------------------------------------
    def dim(self, l: int, v: int, w: int) -> int:
        if l < 0 or l > self.q.h - 2:
            return 0
        return self.t.dim(l, v, w)

    def closed_chains(self, shape: tuple) -> list:
        """All closed chains of the given bundle widths, in deterministic order."""
        n = self.q.n_vertices
        out = []

        def grow(prefix, depth):
            if depth == len(shape):
                if prefix[-1] == prefix[0]:
                    out.append(tuple(prefix))
                return
            v = prefix[-1]
            for w in range(n):
                for r in range(self.dim(shape[depth], v, w)):
                    grow(prefix + [r, w], depth + 1)

        for v0 in range(n):
            grow([v0], 0)
        return out

    # path-level reading ---------------------------------------------------
    def _read(self, vec: dict, widths: tuple) -> dict:
        """Coordinates of (p_{l1} x ... x p_{ln}) vec as {(v0, r1, v1, ..., vn): c}."""
        acc: dict = {}
        for p, c in vec.items():
            parts = []
            pos = 0
            v = p[0]
            ok = True
            for l in widths:
                seg = (v,) + p[1 + pos: 1 + pos + l]
                w = end_vertex(self.q, seg)
                lams = self.t.dual_functionals(l, v, w) if self.dim(l, v, w) else []
                vals = [(r, lam.get(seg)) for r, lam in enumerate(lams)]
                vals = [(r, x) for r, x in vals if x is not None and x]
                if not vals:
                    ok = False
                    break
                parts.append((vals, w))
                pos += l
                v = w
            if not ok:
                continue
            for combo in itertools.product(*[vals for vals, _ in parts]):
                key = [p[0]]
                coef = c
                for (r, x), (_, w) in zip(combo, parts):
                    key += [r, w]
                    coef = coef * x
                key = tuple(key)
                acc[key] = acc[key] + coef if key in acc else coef
        return {k: c for k, c in acc.items() if c}

    # cups and caps --------------------------------------------------------
    @functools.lru_cache(maxsize=None)
    def cup(self, k: int, v: int) -> dict:
        """p_k-coloured cup at v: {(w, r, r2): c}, r in E_k(v, w), r2 in E_k(w, v)."""
        if k == 0:
            return {(v, 0, 0): self.one}
        vec = nested_cup(self.q, self.ops, v, k)
        return {(key[2], key[1], key[3]): c for key, c in self._read(vec, (k, k)).items()}

    @functools.lru_cache(maxsize=None)
    def cap(self, k: int, v: int, r: int, w: int, r2: int) -> CycNumber:
        """Nested cap on U_r x U_r2 (r in E_k(v, w), r2 in E_k(w, v)), the weight at v."""
        if k == 0:
            return self.one
        left = self.t.path_vectors(k, v, w)[r]
        right = self.t.path_vectors(k, w, v)[r2]
        vec = {}
        for p, c in left.items():
            for p2, c2 in right.items():
                full = p + p2[1:]
                vec[full] = vec.get(full, self.zero) + c * c2
        out = _cap_pair(self.q, self.ops, vec, 0, k)
        return out.get((v,), self.zero)

    # trivalent pieces -----------------------------------------------------
    @functools.lru_cache(maxsize=None)
    def vertex(self, R: int, S: int, T: int, v: int, u: int, w: int) -> dict:
        """V: E_R -> E_S x E_T (c = (S+T-R)/2 cups at position S-c), {(m, a, b): c}."""
        c = (S + T - R) // 2
        vec = dict(self.t.path_vectors(R, v, w)[u])
        vec = _cup_pair(self.q, self.ops, vec, S - c, c)
        return {(key[2], key[1], key[3]): x for key, x in self._read(vec, (S, T)).items()}

    @functools.lru_cache(maxsize=None)
    def bend_right(self, S: int, R: int, T: int, v: int, u: int, w: int) -> dict:
        """(beta x 1_T)(u x cup_T) for beta: S T -> R; E_S -> E_R x E_T."""
        c = (S + T - R) // 2
        vec = dict(self.t.path_vectors(S, v, w)[u])
        vec = _cup_pair(self.q, self.ops, vec, S, T)
        vec = _cap_pair(self.q, self.ops, vec, S - c, c)
        return {(key[2], key[1], key[3]): x for key, x in self._read(vec, (R, T)).items()}

    @functools.lru_cache(maxsize=None)
    def bend_left(self, S: int, R: int, T: int, v: int, u: int, w: int) -> dict:
        """(1_S x beta)(cup_S x u) for beta: S T -> R; E_T -> E_S x E_R."""
        c = (S + T - R) // 2
        vec = dict(self.t.path_vectors(T, v, w)[u])
        vec = _cup_pair(self.q, self.ops, vec, 0, S)
        vec = _cap_pair(self.q, self.ops, vec, 2 * S - c, c)
        return {(key[2], key[1], key[3]): x for key, x in self._read(vec, (S, R)).items()}

    # bundle crossing ------------------------------------------------------
    def cross(self, l: int, m: int, sign: int, v0: int, r: int, v1: int, u: int, v2: int) -> dict:
        """c_{l,m}: E_l x E_m -> E_m x E_l with elementary crossings of one sign.

        Input ``r in E_l(v0, v1)``, ``u in E_m(v1, v2)``; output
        ``{(w, u2, r2): c}`` with ``u2 in E_m(v0, w)``, ``r2 in E_l(w, v2)``.
        """
        key = (l, m, sign, v0, r, v1, u, v2)
        hit = self._cross.get(key)
        if hit is not None:
            return hit
        q, back, t = self.q, self.back, self.t
        if m == 0:
            res = {(v0, 0, r): self.one}
        elif l == 0:
            res = {(v2, u, 0): self.one}
        else:
            blk = t.block(m, v1, v2)
            acc: dict = {}
            for pos, c in blk.columns[u].items():
                k1, u1, z = blk.coords[pos]
                for (w1, u1b, rb), c1 in self.cross(l, m - 1, sign, v0, r, v1, u1, k1).items():
                    for (e, r3), c2 in self.braid[sign].entry(l, w1, k1, rb, z).items():
                        w2 = q.tgt[e]
                        kk = (w2, r3)
                        part = acc.setdefault(kk, {})
                        coord = (w1, u1b, e)
                        x = c * c1 * c2
                        part[coord] = part[coord] + x if coord in part else x
            res = {}
            for (w2, r3), part in acc.items():
                target = t.block(m, v0, w2)
                vec = {target.index[cd]: x for cd, x in part.items() if x}
                if not vec:
                    continue
                for u2, x in enumerate(target.read(vec, back)):
                    if x:
                        kk = (w2, u2, r3)
                        res[kk] = res[kk] + x if kk in res else x
            res = {k: x for k, x in res.items() if x}
        self._cross[key] = res
        return res


# ---------------------------------------------------------------------------
# chain vectors


def _add(acc: dict, key, c):
    acc[key] = acc[key] + c if key in acc else c


def apply_cross(tc: TubeCalculus, vec: dict, shape: tuple, pos: int, sign: int) -> tuple[dict, tuple]:
    """Swap factors pos, pos+1 of every chain (left factor moves right)."""
    l, m = shape[pos], shape[pos + 1]
    out: dict = {}
    for chain, c in vec.items():
        v0, r, v1, u, v2 = chain[2 * pos: 2 * pos + 5]
        for (w, u2, r2), x in tc.cross(l, m, sign, v0, r, v1, u, v2).items():
            new = chain[: 2 * pos + 1] + (u2, w, r2) + chain[2 * pos + 4:]
            _add(out, new, c * x)
    new_shape = shape[:pos] + (m, l) + shape[pos + 2:]
    return {k: c for k, c in out.items() if c}, new_shape


def apply_split(tc: TubeCalculus, vec: dict, shape: tuple, pos: int, piece, widths: tuple) -> tuple[dict, tuple]:
    """Replace factor pos by two factors using piece(v, u, w) -> {(m, a, b): c}."""
    out: dict = {}
    for chain, c in vec.items():
        v, u, w = chain[2 * pos: 2 * pos + 3]
        for (m, a, b), x in piece(v, u, w).items():
            new = chain[: 2 * pos + 1] + (a, m, b) + chain[2 * pos + 2:]
            _add(out, new, c * x)
    new_shape = shape[:pos] + widths + shape[pos + 1:]
    return {k: c for k, c in out.items() if c}, new_shape


def move_right(tc: TubeCalculus, vec: dict, shape: tuple, pos: int, steps: int, sign: int):
    for k in range(steps):
        vec, shape = apply_cross(tc, vec, shape, pos + k, sign)
    return vec, shape


# ---------------------------------------------------------------------------
# TM spaces as functionals


@dataclass
class TMSpace:
    a: int
    b: int
    chains: list
    basis: list  # functionals {chain: scalar} (bent alpha-induction solutions)

    @property
    def dim(self) -> int:
        return len(self.basis)


class FrobData:
    """TM with its algebra, pairing and Frobenius structure for one quiver."""

    def __init__(self, q: ADEQuiver):
        if q.h > MAX_H:
            raise FrobeniusLimitError(f"exact backend required, h ≤ {MAX_H}")
        self.q = q
        self.h = q.h
        self.tc = TubeCalculus(q)
        self.md = modular_data(q.h)
        self.back = self.tc.back
        self.zero, self.one = self.back.zero, self.back.one
        self._spaces: dict = {}
        self._encircle: dict = {}

    # basic data -----------------------------------------------------------
    @property
    def unit(self) -> dict:
        """u in TM_1^1: the identity scalar, one on every empty closed chain."""
        return self.space(1, 1).basis[0]

    def d(self, a: int) -> CycNumber:
        return self.md.d[a - 1]

    def labels(self) -> range:
        return range(1, self.h)

    def space(self, a: int, b: int) -> TMSpace:
        key = (a, b)
        if key in self._spaces:
            return self._spaces[key]
        tc = self.tc
        A, B = a - 1, b - 1
        chains = tc.closed_chains((A, B))
        basis = []
        for f in tm_basis(self.q, a, b).vectors:
            alpha = {}
            for chain in chains:
                v, r, w, s2, _ = chain
                mat = f.get((v, w))
                if mat is None:
                    continue
                acc = self.zero
                for s1 in range(len(mat)):
                    coef = mat[s1][r]
                    if coef:
                        acc = acc + coef * tc.cap(B, v, s1, w, s2)
                if acc:
                    alpha[chain] = acc
            basis.append(alpha)
        sp = TMSpace(a, b, chains, basis)
        self._spaces[key] = sp
        return sp

    def nonzero_pairs(self) -> list:
        return [(a, b) for a in self.labels() for b in self.labels() if self.space(a, b).dim]

    # encircling -----------------------------------------------------------
    def encircle_matrix(self, s: int, a: int, b: int, signs: tuple = ENCIRCLE_SIGNS) -> dict:
        """{input chain: {middle chain: c}} so that (encircle_s alpha)(c) = sum c * alpha(middle)."""
        key = (s, a, b, signs)
        if key in self._encircle:
            return self._encircle[key]
        tc = self.tc
        k, A, B = s - 1, a - 1, b - 1
        out = {}
        for chain in tc.closed_chains((A, B)):
            v = chain[0]
            row: dict = {}
            for (m, c1, c2), cc in tc.cup(k, v).items():
                vec = {(v, c1, m, c2) + chain: cc}
                shape = (k, k, A, B)
                vec, shape = apply_cross(tc, vec, shape, 1, signs[0])
                vec, shape = apply_cross(tc, vec, shape, 2, signs[1])
                for full, x in vec.items():
                    # full = (v, c1, m, r', w1, s', w2, c2'', v)
                    if full[6] != full[2]:
                        continue
                    cap = tc.cap(k, v, full[1], full[2], full[7])
                    if cap:
                        _add(row, full[2:7], x * cap)
            out[chain] = {c: x for c, x in row.items() if x}
        self._encircle[key] = out
        return out

    def encircle(self, alpha: dict, s: int, a: int, b: int, signs: tuple = ENCIRCLE_SIGNS) -> dict:
        mat = self.encircle_matrix(s, a, b, signs)
        out = {}
        for chain, row in mat.items():
            acc = self.zero
            for mid, x in row.items():
                y = alpha.get(mid)
                if y:
                    acc = acc + x * y
            if acc:
                out[chain] = acc
        return out

    def project_tm(self, alpha: dict, a: int, b: int, signs: tuple = ENCIRCLE_SIGNS) -> dict:
        total: dict = {}
        for s in self.labels():
            ds = self.d(s)
            for chain, x in self.encircle(alpha, s, a, b, signs).items():
                _add(total, chain, ds * x)
        inv = self.md.global_dim.inverse()
        return {c: x * inv for c, x in total.items() if x}

    def project_rank(self, a: int, b: int, signs: tuple = ENCIRCLE_SIGNS) -> int:
        chains = self.tc.closed_chains((a - 1, b - 1))
        cols = [self.project_tm({c: self.one}, a, b, signs) for c in chains]
        rows = [{j: col[c] for j, col in enumerate(cols) if c in col} for c in chains]
        return self.back.rank(rows, len(chains)) if chains else 0

    def is_fixed(self, alpha: dict, a: int, b: int, signs: tuple = ENCIRCLE_SIGNS) -> bool:
        return _clean(self.project_tm(alpha, a, b, signs)) == _clean(alpha)

    def coordinates(self, alpha: dict, a: int, b: int) -> list | None:
        """Coefficients of alpha in the TM_a^b basis, or None outside the span."""
        sp = self.space(a, b)
        n = sp.dim
        alpha = _clean(alpha)
        if n == 0:
            return [] if not alpha else None
        rows = []
        for chain in sp.chains:
            row = {i: f[chain] for i, f in enumerate(sp.basis) if chain in f}
            if chain in alpha:
                row[n] = -alpha[chain]
            if row:
                rows.append(row)
        ker = self.back.kernel(rows, n + 1)
        for vec in ker.basis:
            if vec[n]:
                scale = vec[n].inverse()
                return [x * scale for x in vec[:n]]
        return None if alpha else [self.zero] * n

    # product ----------------------------------------------------------------
    def product_functional(self, f: dict, g: dict, shape_f: tuple, shape_g: tuple,
                           reorder_sign: int = REORDER_SIGN) -> "ProductFunctional":
        return ProductFunctional(self, [f, g], [shape_f, shape_g], reorder_sign)

    def nabla(self, r: tuple, s: tuple, t: tuple, f: dict, g: dict,
              reorder_sign: int = REORDER_SIGN) -> dict:
        """(f, g) -> functional on closed (r_X, r_Y) chains through the vertices
        V(r_X -> s_X t_X) and V(r_Y -> s_Y t_Y)."""
        if not _admissible(self.h, r, s, t):
            raise ValueError(f"inadmissible fusion triple {s} x {t} -> {r}")
        tc = self.tc
        RX, RY = r[0] - 1, r[1] - 1
        SX, SY = s[0] - 1, s[1] - 1
        TX, TY = t[0] - 1, t[1] - 1
        prod = ProductFunctional(self, [f, g], [(SX, SY), (TX, TY)], reorder_sign)
        out = {}
        for chain in tc.closed_chains((RX, RY)):
            vec = {chain: self.one}
            shape = (RX, RY)
            vec, shape = apply_split(tc, vec, shape, 1, functools.partial(tc.vertex, RY, SY, TY), (SY, TY))
            vec, shape = apply_split(tc, vec, shape, 0, functools.partial(tc.vertex, RX, SX, TX), (SX, TX))
            val = prod.evaluate(vec, shape)
            if val:
                out[chain] = val
        return out

    def nabla_coordinates(self, r, s, t, f, g) -> list | None:
        return self.coordinates(self.nabla(r, s, t, f, g), *r)

    # pairing ----------------------------------------------------------------
    def pairing_values(self, f: dict, g: dict, a: int, b: int, sign: int = PAIRING_SIGN) -> dict:
        """Per-vertex value of <f, g>: nested cups X Y Y X, f on the inner pair,
        g after moving its Y bundle right past X (crossings of ``sign``)."""
        tc = self.tc
        A, B = a - 1, b - 1
        vals = {}
        for v in range(self.q.n_vertices):
            acc = self.zero
            for (w, x1, x2), c1 in tc.cup(A, v).items():
                for (u, y1, y2), c2 in tc.cup(B, w).items():
                    if u != v:
                        continue
                    fv = f.get((v, x1, w, y1, v))
                    if not fv:
                        continue
                    # g~ on (v, y2, w, x2, v): move Y past X
                    for (w2, x3, y3), c3 in tc.cross(B, A, sign, v, y2, w, x2, v).items():
                        gv = g.get((v, x3, w2, y3, v))
                        if gv:
                            acc = acc + c1 * c2 * fv * c3 * gv
            vals[v] = acc
        return vals

    def pairing(self, f: dict, g: dict, a: int, b: int, sign: int = PAIRING_SIGN) -> CycNumber:
        """<f, g> for f, g in TM_a^b (all labels are self-dual)."""
        vals = self.pairing_values(f, g, a, b, sign)
        first = vals[0]
        if any(x != first for x in vals.values()):
            raise ArithmeticError("pairing is not a multiple of the unit")
        return first

    def gram(self, a: int, b: int, sign: int = PAIRING_SIGN) -> list:
        sp = self.space(a, b)
        return [[self.pairing(f, g, a, b, sign) for g in sp.basis] for f in sp.basis]


def _clean(d: dict) -> dict:
    return {k: v for k, v in d.items() if v}


class ProductFunctional:
    """(f_1 x ... x f_n) composed with the reorder X_1..X_n Y_1..Y_n -> X_1 Y_1 ... X_n Y_n."""

    def __init__(self, fr: FrobData, fs: list, shapes: list, reorder_sign: int = REORDER_SIGN):
        self.fr = fr
        self.fs = fs
        self.shapes = shapes
        self.sign = reorder_sign

    def reorder(self, vec: dict, shape: tuple) -> tuple[dict, tuple]:
        tc = self.fr.tc
        n = len(self.fs)
        # factor names: X_i -> ('X', i), Y_i -> ('Y', i)
        names = [("X", i) for i in range(n)] + [("Y", i) for i in range(n)]
        want = [nm for i in range(n) for nm in (("X", i), ("Y", i))]
        # bubble: for each target slot, move the wanted factor leftwards by
        # moving the factors in front of it to the right past it
        for slot, nm in enumerate(want):
            pos = names.index(nm)
            while pos > slot:
                # factor at pos-1 moves right past factor at pos
                vec, shape = apply_cross(tc, vec, shape, pos - 1, self.sign)
                names[pos - 1], names[pos] = names[pos], names[pos - 1]
                pos -= 1
        return vec, shape

    def evaluate(self, vec: dict, shape: tuple) -> CycNumber:
        vec, shape = self.reorder(vec, shape)
        return evaluate_blocks(self.fr, self.fs, vec)

    def functional(self, shape_in: tuple) -> dict:
        """The literal product as a functional on closed chains of shape_in."""
        out = {}
        for chain in self.fr.tc.closed_chains(shape_in):
            val = self.evaluate({chain: self.fr.one}, shape_in)
            if val:
                out[chain] = val
        return out


def evaluate_blocks(fr: FrobData, fs: list, vec: dict) -> CycNumber:
    """Apply f_1 x ... x f_n to chains already ordered X_1 Y_1 X_2 Y_2 ..."""
    total = fr.zero
    for chain, c in vec.items():
        acc = c
        for i, f in enumerate(fs):
            sub = chain[4 * i: 4 * i + 5]
            if sub[0] != sub[4]:
                break
            y = f.get(sub)
            if not y:
                break
            acc = acc * y
        else:
            total = total + acc
    return total


# ---------------------------------------------------------------------------
# structure checks


def _admissible(h: int, r: tuple, s: tuple, t: tuple) -> bool:
    return bool(fusion_mult(s[0], t[0], r[0], h) and fusion_mult(s[1], t[1], r[1], h))


def _shape(pair: tuple) -> tuple:
    return (pair[0] - 1, pair[1] - 1)


def check_unit(fr: FrobData) -> list:
    """nabla(u, g) = g = nabla(g, u) for every basis element g."""
    unit = (1, 1)
    u = fr.space(*unit).basis[0]
    failures = []
    for pair in fr.nonzero_pairs():
        for i, g in enumerate(fr.space(*pair).basis):
            if _clean(fr.nabla(pair, unit, pair, u, g)) != _clean(g):
                failures.append({"side": "left", "pair": list(pair), "index": i})
            if _clean(fr.nabla(pair, pair, unit, g, u)) != _clean(g):
                failures.append({"side": "right", "pair": list(pair), "index": i})
    return failures


def check_closure(fr: FrobData) -> tuple[list, dict]:
    """Every vertex product of basis elements lies in TM; returns structure constants."""
    pairs = fr.nonzero_pairs()
    failures, constants = [], {}
    for r in pairs:
        for s in pairs:
            for t in pairs:
                if not _admissible(fr.h, r, s, t):
                    continue
                for i, f in enumerate(fr.space(*s).basis):
                    for j, g in enumerate(fr.space(*t).basis):
                        coords = fr.coordinates(fr.nabla(r, s, t, f, g), *r)
                        if coords is None:
                            failures.append({"r": list(r), "s": list(s), "t": list(t), "f": i, "g": j})
                        else:
                            constants[(r, s, t, i, j)] = coords
    return failures, constants


def check_commutativity(fr: FrobData, signs: tuple = COMMUTE_SIGNS) -> list:
    """nabla(h, g) o (braid_X x braid_Y) = nabla(g, h) on all closed chains."""
    tc = fr.tc
    pairs = fr.nonzero_pairs()
    failures = []
    for s in pairs:
        for t in pairs:
            SX, SY = _shape(s)
            TX, TY = _shape(t)
            shape = (SX, TX, SY, TY)
            chains = tc.closed_chains(shape)
            for i, g in enumerate(fr.space(*s).basis):
                for j, h in enumerate(fr.space(*t).basis):
                    direct = ProductFunctional(fr, [g, h], [(SX, SY), (TX, TY)])
                    swapped = ProductFunctional(fr, [h, g], [(TX, TY), (SX, SY)])
                    for chain in chains:
                        vec = {chain: fr.one}
                        lhs = direct.evaluate(vec, shape)
                        bv, bs = apply_cross(tc, vec, shape, 0, signs[0])
                        bv, bs = apply_cross(tc, bv, bs, 2, signs[1])
                        rhs = swapped.evaluate(bv, bs)
                        if lhs != rhs:
                            failures.append({"s": list(s), "t": list(t), "g": i, "h": j, "chain": list(chain)})
                            break
    return failures


def check_associativity(fr: FrobData, pairs: list | None = None) -> list:
    """Literal (f g) h = f (g h) on closed chains X1 X2 X3 Y1 Y2 Y3."""
    tc = fr.tc
    pairs = pairs or fr.nonzero_pairs()
    sign = REORDER_SIGN
    failures = []
    for trip in itertools.product(pairs, repeat=3):
        shapes = [_shape(p) for p in trip]
        shape = tuple(x for x, _ in shapes) + tuple(y for _, y in shapes)
        chains = tc.closed_chains(shape)
        if not chains:
            continue
        bases = [fr.space(*p).basis for p in trip]
        for chain in chains:
            vec = {chain: fr.one}
            # (f g) h: X3 past Y1, X3 past Y2, then X2 past Y1
            lv, ls = apply_cross(tc, vec, shape, 2, sign)
            lv, ls = apply_cross(tc, lv, ls, 3, sign)
            lv, ls = apply_cross(tc, lv, ls, 1, sign)
            # f (g h): X3 past Y1, X2 past Y1, then X3 past Y2
            rv, rs = apply_cross(tc, vec, shape, 2, sign)
            rv, rs = apply_cross(tc, rv, rs, 1, sign)
            rv, rs = apply_cross(tc, rv, rs, 3, sign)
            for combo in itertools.product(*[range(len(b)) for b in bases]):
                fs = [bases[k][combo[k]] for k in range(3)]
                if evaluate_blocks(fr, fs, lv) != evaluate_blocks(fr, fs, rv):
                    failures.append({"pairs": [list(p) for p in trip], "basis": list(combo),
                                     "chain": list(chain)})
                    break
    return failures


def check_pairing(fr: FrobData) -> tuple[list, dict]:
    """Pairing is a multiple of the unit, symmetric and non-degenerate on each TM_a^b."""
    failures, grams = [], {}
    for pair in fr.nonzero_pairs():
        try:
            G = fr.gram(*pair)
        except ArithmeticError:
            failures.append({"pair": list(pair), "reason": "not a multiple of the unit"})
            continue
        grams[pair] = G
        n = len(G)
        if any(G[i][j] != G[j][i] for i in range(n) for j in range(n)):
            failures.append({"pair": list(pair), "reason": "not symmetric"})
        if fr.back.rank([{j: x for j, x in enumerate(row) if x} for row in G], n) != n:
            failures.append({"pair": list(pair), "reason": "degenerate"})
    u = fr.space(1, 1).basis[0]
    if fr.pairing(u, u, 1, 1) != fr.one:
        failures.append({"pair": [1, 1], "reason": "<u, u> != 1"})
    return failures, grams


def dual_elements(fr: FrobData, pair: tuple, c) -> list:
    """(g_i*)^v: the elements y with <g_j, y> = c(pair) delta_ij."""
    G = fr.gram(*pair)
    n = len(G)
    scale = c(pair)
    rhs = [[scale if j == i else fr.zero for j in range(n)] for i in range(n)]
    cols = fr.back.solve_square(G, rhs)
    sp = fr.space(*pair)
    out = []
    for col in cols:
        y: dict = {}
        for k, x in enumerate(col):
            if x:
                for chain, v in sp.basis[k].items():
                    _add(y, chain, x * v)
        out.append(_clean(y))
    return out


def _bent_product(fr: FrobData, piece, widths_in: tuple, out_pair: tuple,
                  first: dict, first_shape: tuple, second: dict, second_shape: tuple) -> dict:
    """nabla(bent beta)(first x second) as a functional on closed out_pair chains."""
    tc = fr.tc
    prod = ProductFunctional(fr, [first, second], [first_shape, second_shape])
    out = {}
    for chain in tc.closed_chains(widths_in):
        vec = {chain: fr.one}
        shape = widths_in
        vec, shape = apply_split(tc, vec, shape, 1, piece[1], (first_shape[1], second_shape[1]))
        vec, shape = apply_split(tc, vec, shape, 0, piece[0], (first_shape[0], second_shape[0]))
        val = prod.evaluate(vec, shape)
        if val:
            out[chain] = val
    return out


def check_frobenius(fr: FrobData, c=None) -> list:
    """Balanced Frobenius identity for all admissible R, S, T and basis elements:

        d(S) g*( nabla_S(beta bent right)(f x (h*)^v) )
          = d(T) h*( nabla_T(beta bent left)((g*)^v x f) )

    with ``(x*)^v`` normalized by ``<y, (x*)^v> = c(.) x*(y)`` (default c = d).
    """
    tc = fr.tc
    dim = (lambda p: fr.d(p[0]) * fr.d(p[1]))
    c = c or dim
    pairs = fr.nonzero_pairs()
    duals = {p: dual_elements(fr, p, c) for p in pairs}
    failures = []
    for r in pairs:
        for s in pairs:
            for t in pairs:
                if not _admissible(fr.h, r, s, t):
                    continue
                Rs, Ss, Ts = _shape(r), _shape(s), _shape(t)
                right = [functools.partial(tc.bend_right, Ss[k], Rs[k], Ts[k]) for k in range(2)]
                left = [functools.partial(tc.bend_left, Ss[k], Rs[k], Ts[k]) for k in range(2)]
                for i, f in enumerate(fr.space(*r).basis):
                    lhs_all = [
                        fr.coordinates(_bent_product(fr, right, Ss, s, f, Rs, ht, Ts), *s)
                        for ht in duals[t]
                    ]
                    rhs_all = [
                        fr.coordinates(_bent_product(fr, left, Ts, t, gt, Ss, f, Rs), *t)
                        for gt in duals[s]
                    ]
                    for j in range(len(rhs_all)):
                        for k in range(len(lhs_all)):
                            if lhs_all[k] is None or rhs_all[j] is None:
                                failures.append({"r": list(r), "s": list(s), "t": list(t), "f": i,
                                                 "reason": "bent product outside TM"})
                                continue
                            lhs = dim(s) * lhs_all[k][j]
                            rhs = dim(t) * rhs_all[j][k]
                            if lhs != rhs:
                                failures.append({"r": list(r), "s": list(s), "t": list(t),
                                                 "f": i, "g": j, "h": k,
                                                 "lhs": lhs.to_json()["coeffs"],
                                                 "rhs": rhs.to_json()["coeffs"]})
    return failures


def check_duality(fr: FrobData, c=None) -> list:
    """<g_i, (g_j*)^v> = c g_j*(g_i), the defining normalization, re-evaluated."""
    c = c or (lambda p: fr.d(p[0]) * fr.d(p[1]))
    failures = []
    for pair in fr.nonzero_pairs():
        basis = fr.space(*pair).basis
        for j, y in enumerate(dual_elements(fr, pair, c)):
            for i, g in enumerate(basis):
                want = c(pair) if i == j else fr.zero
                if fr.pairing(g, y, *pair) != want:
                    failures.append({"pair": list(pair), "i": i, "j": j})
    return failures


# ---------------------------------------------------------------------------
# report


@dataclass
class FrobeniusReport:
    quiver: str
    h: int
    dims: dict  # (a, b) -> dim TM_a^b
    project_ranks: dict
    checks: dict  # name -> list of failures
    dim_condition: bool
    invariance_dim_condition: bool
    structure_constants: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return (all(not v for v in self.checks.values())
                and self.dim_condition == self.invariance_dim_condition
                and self.dim_condition)

    def to_json(self) -> dict:
        return {
            "quiver": self.quiver,
            "h": self.h,
            "dims": {f"{a},{b}": n for (a, b), n in sorted(self.dims.items())},
            "project_ranks": {f"{a},{b}": n for (a, b), n in sorted(self.project_ranks.items())},
            "checks": {name: {"ok": not fails, "failures": fails[:20]}
                       for name, fails in self.checks.items()},
            "dim_condition": self.dim_condition,
            "invariance_dim_condition": self.invariance_dim_condition,
            "ok": self.ok,
        }


def frobenius_report(q: ADEQuiver) -> FrobeniusReport:
    """Build TM for q and verify its commutative Frobenius algebra structure exactly."""
    fr = FrobData(q)
    dims, ranks = {}, {}
    fixed_failures = []
    for a in fr.labels():
        for b in fr.labels():
            sp = fr.space(a, b)
            dims[(a, b)] = sp.dim
            ranks[(a, b)] = fr.project_rank(a, b)
            for i, f in enumerate(sp.basis):
                if not fr.is_fixed(f, a, b):
                    fixed_failures.append({"pair": [a, b], "index": i})
            if ranks[(a, b)] != sp.dim:
                fixed_failures.append({"pair": [a, b], "reason": "projection rank differs from dimension"})
    closure, constants = check_closure(fr)
    pairing, _ = check_pairing(fr)
    checks = {
        "projection": fixed_failures,
        "haploid": [] if dims[(1, 1)] == 1 else [{"dim": dims[(1, 1)]}],
        "unit": check_unit(fr),
        "closure": closure,
        "associativity": check_associativity(fr),
        "commutativity": check_commutativity(fr),
        "pairing": pairing,
        "duality": check_duality(fr),
        "frobenius": check_frobenius(fr),
    }
    md = fr.md
    total = fr.zero
    for (a, b), n in dims.items():
        if n:
            total = total + md.d[a - 1] * md.d[b - 1] * n
    Z = [[dims[(a, b)] for b in fr.labels()] for a in fr.labels()]
    inv = invariance_report(Z, q.h)
    return FrobeniusReport(
        quiver=q.name,
        h=q.h,
        dims=dims,
        project_ranks=ranks,
        checks=checks,
        dim_condition=total == md.global_dim,
        invariance_dim_condition=inv.dim_condition,
        structure_constants=constants,
    )
