import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from soergelkit import bimod as bm
from soergelkit.exactla import rank
from soergelkit.errors import IndexOutOfRange, ShapeMismatch, StrandMismatch
from oracles import hilbert_R


def bs_words(n, max_len):
    return [w for L in range(max_len + 1) for w in itertools.product(range(1, n), repeat=L)]


def test_elementary_right_action():
    B = bm.elementary(1, 2)
    x1, x2 = bm.x(2, 1), bm.x(2, 2)
    assert B.degrees == (-1, 1)
    assert B.X[1] == bm.PolyMatrix.from_dense(2, [[0, -x1 * x2], [1, x1 + x2]])
    assert B.X[0] + B.X[1] == bm.PolyMatrix.scalar(2, 2, x1 + x2)


def test_tensor_degrees():
    assert sorted(bm.BSBimodule(2, (1, 1)).degrees) == [-2, 0, 0, 2]
    assert bm.BSBimodule(3, (1,), 2).degrees == (-3, -1)
    assert str(bm.tensor(bm.elementary(1, 3), bm.elementary(2, 3))) == "B1B2"


def test_errors():
    with pytest.raises(IndexOutOfRange):
        bm.elementary(2, 2)
    with pytest.raises(StrandMismatch):
        bm.tensor(bm.elementary(1, 2), bm.elementary(1, 3))
    with pytest.raises(ShapeMismatch):
        bm.BimMap(bm.elementary(1, 2), bm.R_module(2), 0, bm.PolyMatrix.identity(2, 2))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_bimodule_relations(n):
    for w in bs_words(n, 3 if n < 4 else 2):
        bm.check_bimodule(bm.BSBimodule(n, w))


@pytest.mark.parametrize("n", [2, 3])
def test_frobenius_maps_are_bimodule_maps(n):
    for i in range(1, n):
        for name, f in bm.frobenius_maps(i, n).items():
            f.check()


def test_counit_unit():
    for n in (2, 3):
        for i in range(1, n):
            cu = bm.compose(bm.counit(i, n), bm.unit(i, n))
            assert cu.matrix == bm.PolyMatrix.scalar(n, 1, bm.x(n, i) - bm.x(n, i + 1))


def test_splitting_iso():
    for n in (2, 3):
        for i in range(1, n):
            (p1, p2), (i1, i2) = bm.splitting_iso(i, n)
            for p, j in ((p1, i1), (p2, i2)):
                assert (p.matrix @ j.matrix) == bm.PolyMatrix.identity(n, 2)
            assert (p1.matrix @ i2.matrix).is_zero() and (p2.matrix @ i1.matrix).is_zero()
            total = i1.matrix @ p1.matrix + i2.matrix @ p2.matrix
            assert total == bm.PolyMatrix.identity(n, 4)


@pytest.mark.parametrize("n", [3, 4])
def test_zig_zag(n):
    for w in bs_words(n, 3 if n == 3 else 2):
        M = bm.BSBimodule(n, w)
        Md = bm.dual(M)
        coev, ev = bm.coevaluation(M), bm.evaluation(M)
        coev.check()
        ev.check()
        # (id_M (x) ev) (coev (x) id_M) = id_M
        a = bm.whisker(bm.R_module(n), coev, M)
        b = bm.whisker(M, ev, bm.R_module(n))
        assert b.matrix @ a.matrix == bm.PolyMatrix.identity(n, M.rank)
        a = bm.whisker(Md, coev, bm.R_module(n))
        b = bm.whisker(bm.R_module(n), ev, Md)
        assert b.matrix @ a.matrix == bm.PolyMatrix.identity(n, M.rank)


def test_dual_map_of_counit_is_unit():
    for n in (2, 3):
        for i in range(1, n):
            d = bm.dual_map(bm.counit(i, n))
            u = bm.unit(i, n)
            assert d.src.degrees == u.src.degrees and d.tgt.degrees == u.tgt.degrees
            assert d.matrix == u.matrix


@pytest.mark.parametrize("name", ["merge", "split", "mult", "counit", "unit", "cap", "cup"])
def test_dual_map_is_involutive(name):
    f = bm.frobenius_maps(1, 3)[name]
    dd = bm.dual_map(bm.dual_map(f))
    dd.check()
    assert dd.matrix == f.matrix
    assert dd.src.degrees == f.src.degrees


def test_tensor_maps_slice_rank():
    # id_{B1} (x) counit: B1 B1 -> B1(1), surjective in every degree
    n = 2
    f = bm.tensor_maps(bm.identity(bm.elementary(1, n)), bm.counit(1, n))
    f.check()
    for d in range(-2, 6):
        m = bm.slice_matrix(f.matrix, f.src.degrees, f.tgt.degrees, d, f.degree)
        assert rank(m) == len(bm.slice_basis(n, f.tgt.degrees, d))


@given(st.integers(1, 4), st.integers(-4, 16))
def test_slice_dimension_of_R(n, d):
    assert len(bm.slice_basis(n, (0,), d)) == hilbert_R(n, d)
    assert bm.hilbert_R(n, d) == hilbert_R(n, d)


@given(st.lists(st.integers(1, 2), max_size=3), st.integers(-3, 3))
def test_shift_moves_degrees(w, k):
    M = bm.BSBimodule(3, tuple(w))
    assert M.shifted(k).degrees == tuple(g - k for g in M.degrees)


def test_bar_examples():
    assert bm.bar(bm.R_module(2)) == {0: 1}
    assert bm.bar(bm.elementary(1, 2)) == {-1: 1, 1: 1}
    assert bm.bar(bm.R_module(3, 2)) == {-2: 1}


@pytest.mark.parametrize("w", [(1, 2), (1, 1), (2, 1, 2)])
def test_bar_total_rank(w):
    # M (x)_R Q has the dimension of the free left module's rank
    M = bm.BSBimodule(3, w)
    assert sum(bm.bar(M).values()) == M.rank
    assert bm.bar(M, p=101) == bm.bar(M)


def test_reduce_center():
    n = 3
    e1 = bm.x(n, 1) + bm.x(n, 2) + bm.x(n, 3)
    assert bm.reduce_center(e1, n) == 0
    assert bm.reduce_center(bm.x(n, 1), n) != 0
