"""Acceptance suite: one test group per criterion, each with its time budget.

A PASS/FAIL line per criterion is printed in the terminal summary (see
conftest.py) and, with ``-s``, by the tests themselves.
"""
import os
import time
import warnings

import pytest

from tubeinv import frob
from tubeinv.alphainv import check_suite, ciz_reference, diagonal_spectrum, tm_basis, z_matrix
from tubeinv.cyclo import CycNumber, loop_value
from tubeinv.mtc import invariance_report, quantum_dimension, s_entry, t_entry
from tubeinv.quivmod import (
    ade_quiver,
    builtin_names,
    essential_dims,
    loop_check,
    quiver_from_json,
    zigzag_check,
)
from tubeinv.tl import (
    curl_scalar,
    curl_scalar_by_closure,
    e_generator,
    hopf_link,
    jones_wenzl,
    tl_compose,
)

DATA = os.path.join(os.path.dirname(__file__), "data")

# every Z computed by this module, for the T-invariance sweep
_COMPUTED: dict = {}


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _reference(name, h):
    return dict(ciz_reference(h))[name]


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def _say(number, label, ok, detail=""):
    print(f"[criterion {number}] {label}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())


def _z(name, backend="exact", **kw):
    key = (name, backend)
    if key not in _COMPUTED:
        _COMPUTED[key] = (ade_quiver(name).h, z_matrix(ade_quiver(name), backend, **kw))
    return _COMPUTED[key][1]


def _small_builtins(hmax):
    return [n for n in builtin_names() if ade_quiver(n).h <= hmax]


def _disconnected():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with open(os.path.join(DATA, "a2_a2.json"), encoding="utf-8") as fh:
            return quiver_from_json(fh.read())


# ---------------------------------------------------------------------------


@pytest.mark.criterion(1, "A-series: Z(A_{h-1}) is the identity for h = 4..9, exact, < 10 s each")
@pytest.mark.parametrize("h", [4, 5, 6, 7, 8, 9])
def test_criterion_01_a_series(h):
    name = f"A{h - 1}"
    z, secs = _timed(z_matrix, ade_quiver(name))
    _COMPUTED[(name, "exact")] = (h, z)
    ok = z.matrix == _identity(h - 1) and secs < 10
    _say(1, name, ok, f"{secs:.2f}s")
    assert z.backend == "exact"
    assert z.matrix == _identity(h - 1)
    assert secs < 10


@pytest.mark.criterion(2, "D-series: D4, D5, D6 equal the ADE reference, exact, < 120 s each")
@pytest.mark.parametrize("name,h", [("D4", 6), ("D5", 8), ("D6", 10)])
def test_criterion_02_d_series(name, h):
    q = ade_quiver(name)
    assert q.h == h
    z, secs = _timed(z_matrix, q)
    _COMPUTED[(name, "exact")] = (h, z)
    ok = z.matrix == _reference(name, h) and secs < 120
    _say(2, name, ok, f"{secs:.2f}s")
    assert z.matrix == _reference(name, h)
    assert secs < 120


@pytest.mark.criterion(3, "E6: float backend, tolerance 1e-6, reference blocks, gaps reported, < 15 min")
def test_criterion_03_e6_float():
    q = ade_quiver("E6")
    z, secs = _timed(z_matrix, q, "float", tolerance=1e-6)
    _COMPUTED[("E6", "float")] = (12, z)
    blocks = [(1, 7), (4, 8), (5, 11)]
    expected = {(a, b) for blk in blocks for a in blk for b in blk}
    ones = {(a, b) for a in range(1, 12) for b in range(1, 12) if z[a, b]}
    assert len(expected) == 12
    ok = ones == expected and all(z[a, b] == 1 for a, b in ones) and z.gaps and secs < 900
    _say(3, "E6", ok, f"{secs:.2f}s, smallest gap ratio {z.min_gap():.3g}")
    assert z.backend == "float" and z.tolerance == 1e-6
    assert ones == expected and all(z[a, b] == 1 for a, b in ones)
    assert z.matrix == _reference("E6", 12)
    assert z.gaps and z.min_gap() > 10
    assert secs < 900


@pytest.mark.criterion(4, "spectral diagonals for every builtin incl. E7, E8, exact, < 1 s each")
@pytest.mark.parametrize("name", builtin_names())
def test_criterion_04_diagonals(name):
    q = ade_quiver(name)
    diag, secs = _timed(diagonal_spectrum, q)
    ref = _reference(name, q.h)
    expect = [ref[m][m] for m in range(q.h - 1)]
    ok = diag == expect and secs < 1
    _say(4, name, ok, f"{secs:.3f}s")
    assert diag == expect
    assert secs < 1
    if name == "E8":
        assert [m for m, v in enumerate(diag, 1) if v] == [1, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.criterion(6, "S-invariance: dim condition and ZS = SZ for every ADE quiver with h <= 12")
@pytest.mark.parametrize("name", _small_builtins(12))
def test_criterion_06_s_invariance(name):
    backend = "float" if name == "E6" and ("E6", "float") in _COMPUTED else "exact"
    z = _z(name, backend)
    rep = invariance_report(z.matrix, ade_quiver(name).h)
    _say(6, name, rep.dim_condition and rep.commutes_with_S)
    assert rep.dim_condition
    assert rep.commutes_with_S


@pytest.mark.criterion(6, "S-invariance: dim condition and ZS = SZ for every ADE quiver with h <= 12")
def test_criterion_06_negative_control():
    Z = [[1, 0, 0], [0, 0, 0], [0, 0, 0]]
    rep = invariance_report(Z, 4)
    quarter = CycNumber.from_rational(16, "1/4")
    ok = not rep.commutes_with_S and rep.s_defect == quarter
    _say(6, "E11 at h = 4", ok, "defect 1/4")
    assert not rep.commutes_with_S
    assert rep.s_defect == quarter


@pytest.mark.criterion(5, "T-invariance: ZT = TZ and Z_ab != 0 => equal curls, every computed Z")
def test_criterion_05_t_invariance():
    # the criteria above computed these; fill in whatever was deselected
    for name in _small_builtins(12):
        _z(name, "exact")
    _z("E6", "float")
    checked = 0
    for (name, backend), (h, z) in sorted(_COMPUTED.items()):
        rep = invariance_report(z.matrix, h)
        assert rep.commutes_with_T, (name, backend)
        for a in range(1, h):
            for b in range(1, h):
                if z[a, b]:
                    assert curl_scalar(a, h) == curl_scalar(b, h), (name, a, b)
        checked += 1
    _say(5, f"{checked} matrices", True)


@pytest.mark.criterion(7, "haploidity: Z11 = 1 for connected builtins, Z11 = 2 for A2+A2")
@pytest.mark.parametrize("name", builtin_names())
def test_criterion_07_connected(name):
    q = ade_quiver(name)
    assert q.components() == 1
    dim = tm_basis(q, 1, 1).dim
    _say(7, name, dim == 1)
    assert dim == 1


@pytest.mark.criterion(7, "haploidity: Z11 = 1 for connected builtins, Z11 = 2 for A2+A2")
def test_criterion_07_disconnected():
    q = _disconnected()
    res = check_suite(q)
    _say(7, "A2+A2", res.z[1, 1] == 2)
    assert q.components() == 2
    assert res.z[1, 1] == 2
    assert not res.report.haploid


@pytest.mark.criterion(8, "hopf_link and curl_scalar equal closed-form S and T for h = 3..6, exact")
@pytest.mark.parametrize("h", [3, 4, 5, 6])
def test_criterion_08_modular_data(h):
    for a in range(1, h):
        assert curl_scalar(a, h) == t_entry(a, h)
        assert curl_scalar_by_closure(a, h) == t_entry(a, h)
        for b in range(1, h):
            assert hopf_link(a, b, h) == s_entry(a, b, h)
    _say(8, f"h = {h}", True)


@pytest.mark.criterion(9, "Frobenius suite for A3, A4, A5, D4, exact, < 5 min total")
def test_criterion_09_frobenius():
    t0 = time.perf_counter()
    for name in ("A3", "A4", "A5", "D4"):
        rep = frob.frobenius_report(ade_quiver(name))
        data = rep.to_json()
        failed = [k for k, c in data["checks"].items() if not c["ok"]]
        _say(9, name, rep.ok, ", ".join(failed))
        assert not failed, (name, failed)
        assert rep.dim_condition
        assert rep.ok
    secs = time.perf_counter() - t0
    _say(9, "total time", secs < 300, f"{secs:.1f}s")
    assert secs < 300


# ---------------------------------------------------------------------------
# structural suites, each exact and under five minutes

_C10 = "structural suites: TL/JW, zig-zag and loops, Chebyshev, projection rank, deep regression"


def _budget(t0):
    secs = time.perf_counter() - t0
    assert secs < 300
    return secs


@pytest.mark.criterion(10, _C10)
def test_criterion_10_tl_relations_and_jones_wenzl():
    t0 = time.perf_counter()
    for h in range(3, 9):
        beta = loop_value(h)
        for n in range(2, 9):
            es = [e_generator(k, n, h) for k in range(1, n)]
            for k, ek in enumerate(es):
                assert tl_compose(ek, ek) == ek.scale(beta)
                if k + 1 < len(es):
                    assert tl_compose(tl_compose(ek, es[k + 1]), ek) == ek
                    assert tl_compose(tl_compose(es[k + 1], ek), es[k + 1]) == es[k + 1]
                for j in range(k + 2, len(es)):
                    assert tl_compose(ek, es[j]) == tl_compose(es[j], ek)
        for n in range(0, h):
            p = jones_wenzl(n, h)
            assert tl_compose(p, p) == p
            for k in range(1, n):
                e = e_generator(k, n, h)
                assert tl_compose(p, e).is_zero() and tl_compose(e, p).is_zero()
    _say(10, "TL relations / JW", True, f"{_budget(t0):.1f}s")


@pytest.mark.criterion(10, _C10)
def test_criterion_10_zigzag_and_loops():
    t0 = time.perf_counter()
    for name in builtin_names():
        q = ade_quiver(name)
        assert all(loop_check(q).values()), name
        assert zigzag_check(q), name
    _say(10, "zig-zag and loops", True, f"{_budget(t0):.1f}s")


@pytest.mark.criterion(10, _C10)
def test_criterion_10_chebyshev_and_vanishing():
    t0 = time.perf_counter()
    for name in builtin_names():
        q = ade_quiver(name)
        n = q.n_vertices
        prev, cur = essential_dims(q, 0), essential_dims(q, 1)
        assert prev == _identity(n)
        for length in range(1, q.h - 1):
            nxt = essential_dims(q, length + 1)
            expect = [[sum(cur[i][k] * q.adjacency[k][j] for k in range(n)) - prev[i][j]
                       for j in range(n)] for i in range(n)]
            assert nxt == expect, (name, length)
            prev, cur = cur, nxt
        assert not any(any(row) for row in cur), name
    _say(10, "Chebyshev / E_{h-1} = 0", True, f"{_budget(t0):.1f}s")


@pytest.mark.criterion(10, _C10)
def test_criterion_10_projection_rank():
    t0 = time.perf_counter()
    for name in _small_builtins(6):
        q = ade_quiver(name)
        fr = frob.FrobData(q)
        z = _z(name)
        for a in range(1, q.h):
            for b in range(1, q.h):
                assert fr.project_rank(a, b) == tm_basis(q, a, b).dim == z[a, b], (name, a, b)
    _say(10, "project_tm rank", True, f"{_budget(t0):.1f}s")


@pytest.mark.criterion(10, _C10)
def test_criterion_10_deep_regression():
    t0 = time.perf_counter()
    for name in _small_builtins(6):
        q = ade_quiver(name)
        assert z_matrix(q, deep=True).matrix == z_matrix(q).matrix, name
    _say(10, "--deep regression", True, f"{_budget(t0):.1f}s")
