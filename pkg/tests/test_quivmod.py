import json
import os
import warnings

import pytest

from tubeinv.cyclo import CycNumber, quantum_integer
from tubeinv.quivmod import (
    GradedMap,
    QuiverError,
    ade_quiver,
    apply_operator,
    builtin_names,
    essential_basis,
    essential_dims,
    loop_check,
    m_generator,
    make_quiver,
    path_basis,
    pivotality_check,
    quiver_from_json,
    tower,
    zigzag_check,
)

SMALL = ["A2", "A3", "A4", "A5", "A6", "A7", "D4", "D5", "D6", "E6"]


def _matpow_counts(adj, length):
    n = len(adj)
    cur = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(length):
        cur = [[sum(cur[i][k] * adj[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return cur


def test_builtin_names_cover_the_series():
    names = builtin_names()
    assert names[0] == "A2" and "A29" in names and "D16" in names
    assert {"E6", "E7", "E8"} <= set(names)
    assert len(names) == 28 + 13 + 3


def test_coxeter_numbers():
    assert ade_quiver("A3").h == 4
    assert ade_quiver("D4").h == 6
    assert ade_quiver("E6").h == 12 and ade_quiver("E7").h == 18 and ade_quiver("E8").h == 30
    d4 = ade_quiver("D4")
    assert sorted(sum(r) for r in d4.adjacency) == [1, 1, 1, 3]


def test_a3_eigenvector_is_signed_quantum_integers():
    q = ade_quiver("A3")
    scale = q.x[0]
    for j in range(3):
        assert q.x[j] == scale * quantum_integer(j + 1, 4) * (-1) ** j


@pytest.mark.parametrize("name", builtin_names())
def test_eigenvector_equation_and_loops(name):
    q = ade_quiver(name)
    n = q.n_vertices
    for i in range(n):
        gx = CycNumber.zero(q.order)
        for j in range(n):
            if q.adjacency[i][j]:
                gx = gx + q.x[j]
        assert gx == q.beta * q.x[i]
        assert q.x[i]
    assert all(loop_check(q).values())
    assert zigzag_check(q)


@pytest.mark.parametrize("name", builtin_names())
def test_chebyshev_dims_and_vanishing(name):
    q = ade_quiver(name)
    prev = essential_dims(q, 0)
    cur = essential_dims(q, 1)
    assert cur == [list(r) for r in q.adjacency]
    for l in range(1, q.h - 1):
        nxt = essential_dims(q, l + 1)
        n = q.n_vertices
        expect = [[sum(cur[i][k] * q.adjacency[k][j] for k in range(n)) - prev[i][j] for j in range(n)]
                  for i in range(n)]
        assert nxt == expect
        assert all(v >= 0 for row in nxt for v in row)
        prev, cur = cur, nxt
    assert not any(any(r) for r in essential_dims(q, q.h - 1))


@pytest.mark.parametrize("name", SMALL)
def test_essential_tower_dims_match_chebyshev(name):
    q = ade_quiver(name)
    t = tower(q)
    for l in range(q.h):
        assert t.dims(l) == essential_dims(q, l)


def test_a3_length_two_is_antidiagonal():
    q = ade_quiver("A3")
    assert essential_basis(q, 2).dims() == [[0, 0, 1], [0, 1, 0], [1, 0, 0]]
    assert essential_basis(q, 0).dims() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


@pytest.mark.parametrize("name", ["A4", "D4", "D5"])
def test_essential_vectors_are_killed_by_caps_and_fixed_by_projection(name):
    q = ade_quiver(name)
    t = tower(q)
    for l in range(2, q.h - 1):
        for (i, j) in t.level(l):
            for vec in t.path_vectors(l, i, j):
                for k in range(1, l):
                    assert apply_operator([("cap", k)], vec, q) == {}
                assert t.jw_project(vec, 0, l) == vec


def test_path_counts_are_matrix_powers():
    q = ade_quiver("D5")
    for l in range(5):
        pb = path_basis(q, l)
        counts = _matpow_counts(q.adjacency, l)
        for i in range(q.n_vertices):
            for j in range(q.n_vertices):
                assert pb.count(i, j) == counts[i][j]


def test_generator_formulas():
    q = ade_quiver("A4")
    one = CycNumber.one(q.order)
    for i in range(q.n_vertices):
        vec = apply_operator([("cup", 0), ("cap", 1)], {(i,): one}, q)
        assert vec == {(i,): q.beta}
    # e_1 on b b*: x_{t(b)} / x_i times sum_c c c*
    e1 = m_generator(q, "e_1", 2)
    for a in range(len(q.src)):
        i = q.src[a]
        image = e1.entries[(i, a, a ^ 1)]
        for c in q.out_arrows[i]:
            assert image[(i, c, c ^ 1)] == q.x[q.tgt[a]] * q.x[i].inverse()
        assert len(image) == len(q.out_arrows[i])


def test_e_relations_pull_back():
    q = ade_quiver("A5")
    one = CycNumber.one(q.order)
    from tubeinv.quivmod import _paths

    for plist in _paths(q, 4).values():
        for p in plist[:6]:
            v = {p: one}
            for k in (1, 2, 3):
                ee = apply_operator([("e", k), ("e", k)], v, q)
                e = apply_operator([("e", k)], v, q)
                assert ee == {x: c * q.beta for x, c in e.items()}
            for k in (1, 2):
                assert apply_operator([("e", k), ("e", k + 1), ("e", k)], v, q) == apply_operator([("e", k)], v, q)
            for sgn in (1, -1):
                back = apply_operator([("cross", 2, sgn), ("cross", 2, -sgn)], v, q)
                assert back == v


def test_m_generator_position_validation():
    q = ade_quiver("A3")
    with pytest.raises(ValueError):
        m_generator(q, "cap_3", 3)
    with pytest.raises(ValueError):
        m_generator(q, "e_0", 2)
    g = m_generator(q, "cup_0", 0)
    assert isinstance(g, GradedMap) and g.target == 2


def test_jw_two_projection_kills_e():
    q = ade_quiver("A4")
    t = tower(q)
    one = CycNumber.one(q.order)
    a = q.out_arrows[1][0]
    v = {(1, a, a ^ 1): one}
    proj = t.jw_project(v, 0, 2)
    assert apply_operator([("e", 1)], proj, q) == {}
    # p_2 = id + e/[2]
    e = apply_operator([("e", 1)], v, q)
    inv2 = quantum_integer(2, q.h).inverse()
    manual = dict(v)
    for p, c in e.items():
        manual[p] = manual.get(p, CycNumber.zero(q.order)) + c * inv2
    assert proj == {p: c for p, c in manual.items() if c}


@pytest.mark.parametrize("name,n", [("A3", 3), ("D4", 4), ("A6", 4), ("E6", 4), ("D6", 4)])
def test_pivotality(name, n):
    rep = pivotality_check(ade_quiver(name), n)
    assert rep["ok"], rep


def test_pivotality_n1_trivial():
    assert pivotality_check(ade_quiver("A5"), 1, dual_lengths=0)["ok"]


def test_user_quiver_roundtrip_and_validation(data_dir):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        q = quiver_from_json(open(os.path.join(data_dir, "a2_a2.json")).read())
    assert q.components() == 2 and any("disconnected" in str(w.message) for w in caught)
    same = quiver_from_json(json.dumps(ade_quiver("A3").to_json()))
    assert same.adjacency == ade_quiver("A3").adjacency
    with pytest.raises(QuiverError):
        quiver_from_json({"name": "x", "vertices": ["a"], "edges": [], "h": 4})
    with pytest.raises(QuiverError):
        # A3 graph with the wrong Coxeter number has no eigenvector for beta
        make_quiver("bad", ["1", "2", "3"], [("1", "2"), ("2", "3")], 5)
    with pytest.raises(QuiverError):
        # A4 at h = 7 : (h = 5 is correct) no nowhere-zero eigenvector
        make_quiver("bad", ["1", "2", "3", "4"], [("1", "2"), ("2", "3"), ("3", "4")], 7)
    with pytest.raises(QuiverError):
        quiver_from_json({"vertices": ["a"], "edges": [], "h": 4})
