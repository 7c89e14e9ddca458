import os
import warnings

import pytest

from tubeinv.alphainv import (
    BraidTable,
    charpoly,
    check_suite,
    ciz_match,
    ciz_reference,
    diagonal_spectrum,
    tm_basis,
    z_matrix,
)
from tubeinv.cyclo import CycNumber
from tubeinv.linalg import FloatBackend, RankAmbiguityError
from tubeinv.mtc import invariance_report, t_entry
from tubeinv.quivmod import ade_quiver, apply_operator, builtin_names, end_vertex, quiver_from_json, tower
from tubeinv.tl import curl_scalar


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _add(acc, key, c):
    acc[key] = acc[key] + c if key in acc else c


def _path_crossings(q, vec, positions, sign):
    return apply_operator([("cross", k, sign) for k in positions], vec, q)


def _expand(t, l, i, j, coeffs):
    """sum_r coeffs[r] U_r as a path vector of E_l(i, j)."""
    out = {}
    for c, u in zip(coeffs, t.path_vectors(l, i, j)):
        if c:
            for p, x in u.items():
                _add(out, p, c * x)
    return {p: c for p, c in out.items() if c}


# ---------------------------------------------------------------------------
# crossing tables against path-level skein crossings


@pytest.mark.parametrize("name", ["A4", "D4", "D5"])
@pytest.mark.parametrize("sign", [1, -1])
def test_braid_table_matches_path_crossings(name, sign):
    q = ade_quiver(name)
    t = tower(q)
    tab = BraidTable(t, sign)
    for l in range(0, q.h - 1):
        for i, k, r, z in tab.inputs(l):
            u = t.path_vectors(l, i, k)[r]
            vec = {p + (z,): c for p, c in u.items()}
            direct = _path_crossings(q, vec, range(l, 0, -1), sign)
            via = {}
            for (e, r2), c in tab.entry(l, i, k, r, z).items():
                for p, x in t.path_vectors(l, q.tgt[e], q.tgt[z])[r2].items():
                    _add(via, (i, e) + p[1:], c * x)
            assert direct == {p: c for p, c in via.items() if c}


def _apply_f(q, t, f, la, lb, vec, offset):
    """Apply the graded map f: E_la -> E_lb to arrows offset+1.. of each path."""
    out = {}
    groups = {}
    for p, c in vec.items():
        head, seg = p[: offset + 1], p[offset + 1:]
        start = end_vertex(q, head)
        groups.setdefault(head, {})[(start,) + seg] = c
    for head, part in groups.items():
        m = end_vertex(q, head)
        j = end_vertex(q, next(iter(part)))
        lams = t.dual_functionals(la, m, j)
        coords = []
        for lam in lams:
            acc = CycNumber.zero(q.order)
            for p, c in part.items():
                if p in lam:
                    acc = acc + lam[p] * c
            coords.append(acc)
        mat = f.get((m, j))
        if mat is None:
            assert not any(coords)
            continue
        image = [sum((mat[s][r] * coords[r] for r in range(len(coords))), CycNumber.zero(q.order))
                 for s in range(len(mat))]
        for p, x in _expand(t, lb, m, j, image).items():
            _add(out, head + p[1:], x)
    return {p: c for p, c in out.items() if c}


@pytest.mark.parametrize("name,cells", [
    ("A4", [(2, 2), (3, 3), (4, 4)]),
    ("D4", [(3, 3), (1, 5), (5, 1), (5, 5)]),
])
def test_tm_basis_satisfies_square_at_path_level(name, cells):
    q = ade_quiver(name)
    t = tower(q)
    for a, b in cells:
        la, lb = a - 1, b - 1
        basis = tm_basis(q, a, b)
        assert basis.dim >= 1
        for f in basis.vectors:
            for (i, k), blk in t.level(la).items():
                for r in range(blk.dim):
                    u = t.path_vectors(la, i, k)[r]
                    for z in q.out_arrows[k]:
                        vec = {p + (z,): c for p, c in u.items()}
                        # (1_B x f) o sigma-bar: the arrow moves left under the bundle
                        lhs = _apply_f(q, t, f, la, lb, _path_crossings(q, vec, range(la, 0, -1), -1), 1)
                        # sigma o (f x 1_B)
                        fu = _apply_f(q, t, f, la, lb, u, 0)
                        rhs = _path_crossings(q, {p + (z,): c for p, c in fu.items()}, range(lb, 0, -1), 1)
                        assert lhs == rhs


def test_tm_basis_images_are_essential():
    q = ade_quiver("D4")
    t = tower(q)
    for f in tm_basis(q, 3, 3).vectors:
        for (m, j), mat in f.items():
            for r in range(len(mat[0])):
                image = _expand(t, 2, m, j, [row[r] for row in mat])
                assert apply_operator([("cap", 1)], image, q) == {}
                assert t.jw_project(image, 0, 2) == image


# ---------------------------------------------------------------------------
# dimensions and Z matrices


def test_a_series_tm_dims_are_kronecker():
    for h in (4, 5, 6):
        q = ade_quiver(f"A{h - 1}")
        for a in range(1, h):
            for b in range(1, h):
                assert tm_basis(q, a, b).dim == (a == b)


def test_d4_middle_block_is_two_dimensional():
    q = ade_quiver("D4")
    assert tm_basis(q, 3, 3).dim == 2
    assert tm_basis(q, 1, 1).dim == 1


def test_z_matrix_examples():
    assert z_matrix(ade_quiver("A3")).matrix == _identity(3)
    d5 = z_matrix(ade_quiver("D5"))
    expect = [[0] * 7 for _ in range(7)]
    for a in (1, 3, 5, 7):
        expect[a - 1][a - 1] = 1
    for a, b in [(2, 6), (6, 2), (4, 4)]:
        expect[a - 1][b - 1] = 1
    assert d5.matrix == expect
    assert d5[2, 6] == 1 and d5.backend == "exact" and d5.tolerance is None


def test_disconnected_fixture_has_two_units(data_dir):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        q = quiver_from_json(open(os.path.join(data_dir, "a2_a2.json")).read())
    res = check_suite(q)
    assert res.z[1, 1] == 2
    assert not res.report.haploid and not res.ok


@pytest.mark.parametrize("name", ["A2", "A3", "A4", "A5", "D4"])
def test_deep_constraint_regression(name):
    q = ade_quiver(name)
    assert z_matrix(q, deep=True).matrix == z_matrix(q).matrix


def test_float_backend_reproduces_exact_with_gaps():
    q = ade_quiver("D5")
    zf = z_matrix(q, "float")
    assert zf.matrix == z_matrix(q).matrix
    assert zf.backend == "float" and zf.tolerance == 1e-6
    assert zf.gaps and zf.min_gap() > 1e3


def test_float_rank_ambiguity_is_an_error():
    back = FloatBackend(16, 1e-6)
    rows = [{0: 1.0}, {1: 5e-6}]  # second singular value within 10x of the threshold
    with pytest.raises(RankAmbiguityError):
        back.rank(rows, 2, "crafted")


def test_threads_give_the_same_answer(monkeypatch):
    monkeypatch.setenv("TUBEINV_THREADS", "4")
    q = ade_quiver("D6")
    assert z_matrix(q).matrix == ciz_reference(10)[1][1]


@pytest.mark.parametrize("name", ["A3", "A4", "A5", "D4"])
def test_element_level_t_invariance_with_diagrammatic_twists(name):
    q = ade_quiver(name)
    z = z_matrix(q)
    for a in range(1, q.h):
        for b in range(1, q.h):
            if z[a, b]:
                assert curl_scalar(a, q.h) == curl_scalar(b, q.h)


@pytest.mark.parametrize("name,backend", [("D5", "exact"), ("D6", "exact"), ("E6", "float")])
def test_element_level_t_invariance_larger_h(name, backend):
    q = ade_quiver(name)
    z = z_matrix(q, backend)
    for a in range(1, q.h):
        for b in range(1, q.h):
            if z[a, b]:
                assert curl_scalar(a, q.h) == curl_scalar(b, q.h)
                assert t_entry(a, q.h) == t_entry(b, q.h)


# ---------------------------------------------------------------------------
# diagonals and the reference list


def test_charpoly_small():
    assert charpoly(ade_quiver("A3").adjacency) == [1, 0, -2, 0]
    assert charpoly(ade_quiver("D4").adjacency) == [1, 0, -3, 0, 0]


def test_diagonal_examples():
    assert diagonal_spectrum(ade_quiver("A3")) == [1, 1, 1]
    assert diagonal_spectrum(ade_quiver("A5")) == [1, 1, 1, 1, 1]
    assert diagonal_spectrum(ade_quiver("D4")) == [1, 0, 2, 0, 1]
    e8 = diagonal_spectrum(ade_quiver("E8"))
    assert [m for m, v in enumerate(e8, 1) if v] == [1, 7, 11, 13, 17, 19, 23, 29]
    assert set(e8) == {0, 1}


@pytest.mark.parametrize("name", ["A4", "A7", "D5", "D6", "D7", "E6"])
def test_diagonal_matches_z_diagonal(name):
    q = ade_quiver(name)
    z = z_matrix(q)
    assert diagonal_spectrum(q) == [z[m, m] for m in range(1, q.h)]


def test_ciz_reference_examples():
    assert ciz_reference(5) == [("A4", _identity(4))]
    h6 = dict(ciz_reference(6))
    assert set(h6) == {"A5", "D4"}
    d4 = h6["D4"]
    assert d4[2][2] == 2 and d4[0][4] == d4[4][0] == d4[0][0] == d4[4][4] == 1
    assert sum(map(sum, d4)) == 6
    h18 = dict(ciz_reference(18))
    assert set(h18) == {"A17", "D10", "E7"}
    e7 = h18["E7"]
    assert e7[8][2] == e7[8][14] == e7[2][8] == e7[14][8] == 1 and e7[8][8] == 1


@pytest.mark.parametrize("h", range(3, 31))
def test_every_reference_invariant_passes_the_report(h):
    for name, Z in ciz_reference(h):
        rep = invariance_report(Z, h)
        assert rep.ok, (name, rep)
    assert ciz_match(_identity(h - 1), h) == f"A{h - 1}"


def test_e6_exact_matches_reference():
    res = check_suite(ade_quiver("E6"))
    assert res.ciz_match == "E6" and res.ok
    ones = {(a, b) for a in range(1, 12) for b in range(1, 12) if res.z[a, b]}
    blocks = [(1, 7), (4, 8), (5, 11)]
    assert ones == {(a, b) for blk in blocks for a in blk for b in blk}


def test_suite_json_shape():
    data = check_suite(ade_quiver("A3")).to_json()
    assert set(data) >= {"h", "quiver", "labels", "Z", "checks", "ciz_match", "backend", "tolerance"}
    assert data["checks"] == {"T": True, "S": True, "haploid": True, "dim_condition": True}
    assert data["ciz_match"] == "A3"


def test_label_range_checked():
    with pytest.raises(ValueError):
        tm_basis(ade_quiver("A3"), 4, 1)


def test_builtins_with_small_h_are_all_modular_invariants():
    for name in builtin_names():
        q = ade_quiver(name)
        if q.h > 12:
            continue
        res = check_suite(q)
        assert res.ok and res.ciz_match == name
