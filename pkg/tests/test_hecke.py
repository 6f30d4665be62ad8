import random

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from soergelkit import hecke as hk
from soergelkit.errors import IndexOutOfRange, ParseError, StrandMismatch
from soergelkit.laurent import ONE, Q, V, VINV, ZERO, LaurentRat
from oracles import TREFOIL_GOLDEN, a, a_coefficients, oracle_word, to_sympy, trefoil_skein, unknot_trace, v

GAP = VINV - V  # v^-1 - v


def elements(n):
    return st.integers(0, 2 ** 32).map(lambda s: hk.random_element(n, random.Random(s)))


def words(n, max_len=5):
    gens = [i for i in range(1, n) for i in (i, -i)]
    return st.lists(st.sampled_from(gens), max_size=max_len).map(lambda ls: hk.BraidWord(n, tuple(ls)))


def trace_to_sympy(tr: dict):
    return sum(to_sympy(c) * a ** k for k, c in tr.items())


# -- permutations -------------------------------------------------------------

def test_perm_basics():
    for n in range(1, 5):
        for w in hk.symmetric_group(n):
            assert len(w.reduced_word) == w.length
            assert hk.Perm.from_word(n, w.reduced_word) == w
            assert w * w.inverse() == hk.Perm.identity(n)
    assert hk.longest_element(3).length == 3


def test_coset_factor():
    for n in range(2, 5):
        for w in hk.symmetric_group(n):
            u, k = hk.coset_factor(w)
            d = hk.Perm.identity(n)
            for i in range(n - 1, k - 1, -1):
                d = d.right_mul(i)
            assert u * d == w
            assert u(n) == n
            assert w.length == u.length + (n - k)


def test_bruhat_order_s3():
    e, s1, s2 = hk.Perm.identity(3), hk.Perm.from_word(3, [1]), hk.Perm.from_word(3, [2])
    w0 = hk.longest_element(3)
    assert e.bruhat_le(s1) and s1.bruhat_le(w0) and not s1.bruhat_le(s2)
    assert sum(x.bruhat_le(y) for x in hk.symmetric_group(3) for y in hk.symmetric_group(3)) == 19


# -- braid words ----------------------------------------------------------------

def test_parse():
    assert hk.BraidWord.parse(3, "1 -2 1").letters == (1, -2, 1)
    assert hk.BraidWord.parse(2, "").letters == ()
    with pytest.raises(ParseError) as err:
        hk.BraidWord.parse(2, "1 x")
    assert err.value.position == 2
    with pytest.raises(ParseError):
        hk.BraidWord.parse(2, "1 2")
    with pytest.raises(IndexOutOfRange):
        hk.BraidWord(2, (3,))


def test_braid_word_ops():
    b = hk.BraidWord.parse(3, "1 -2 2")
    assert b.writhe == 1 and b.n_positive == 2 and b.n_negative == 1
    assert b.inverse().letters == (-2, 2, -1)
    assert (b * b.inverse()).letters == (1, -2, 2, -2, 2, -1)


# -- the algebra -------------------------------------------------------------------

def test_quadratic_relation():
    H = hk.HeckeElt.generator(2, 1)
    assert H * H == hk.HeckeElt.one(2) + H.scale(GAP)
    # (H + v)(H - v^-1) = 0
    one = hk.HeckeElt.one(2)
    assert (H + one.scale(V)) * (H - one.scale(VINV)) == hk.HeckeElt(2)


def test_identity_is_unit():
    s1 = hk.HeckeElt.generator(2, 1)
    assert hk.hecke_mul(hk.HeckeElt.one(2), s1) == s1


@pytest.mark.parametrize("n", [3, 4])
def test_braid_relations(n):
    H = [None] + [hk.HeckeElt.generator(n, i) for i in range(1, n)]
    for i in range(1, n - 1):
        assert H[i] * H[i + 1] * H[i] == H[i + 1] * H[i] * H[i + 1]
    for i in range(1, n):
        for j in range(i + 2, n):
            assert H[i] * H[j] == H[j] * H[i]
        assert H[i] * hk.HeckeElt.generator_inverse(n, i) == hk.HeckeElt.one(n)


def test_braid_to_hecke_against_oracle():
    for n, word in [(2, "1 1 1"), (3, "1 2 -1"), (3, "-2 -1 2 1"), (4, "1 3 -2 3")]:
        b = hk.BraidWord.parse(n, word)
        x = hk.braid_to_hecke(b)
        ref = oracle_word(n, b.letters)
        assert {w.images for w in x.coeffs} == set(ref)
        for w, c in x.coeffs.items():
            assert sp.simplify(to_sympy(c) - ref[w.images]) == 0


def test_braid_to_hecke_basic():
    assert hk.braid_to_hecke(hk.BraidWord(2, ())) == hk.HeckeElt.one(2)
    assert hk.braid_to_hecke(hk.BraidWord.parse(2, "1 -1")) == hk.HeckeElt.one(2)


@given(elements(3), elements(3), elements(3))
def test_associativity(x, y, z):
    assert (x * y) * z == x * (y * z)


@given(words(3), words(3))
def test_braid_to_hecke_multiplicative(b, c):
    assert hk.braid_to_hecke(b * c) == hk.braid_to_hecke(b) * hk.braid_to_hecke(c)
    assert hk.braid_to_hecke(b) * hk.braid_to_hecke(b.inverse()) == hk.HeckeElt.one(3)


def test_strand_mismatch():
    with pytest.raises(StrandMismatch):
        hk.HeckeElt.one(2) * hk.HeckeElt.one(3)
    with pytest.raises(StrandMismatch):
        hk.pairing(hk.HeckeElt.one(2), hk.HeckeElt.one(3))


# -- negative basis, epsilon, duality ---------------------------------------------------

def test_negative_basis_matrix():
    s1 = hk.Perm.from_word(2, [1])
    nb = hk.negative_basis_matrix(2)
    assert nb[hk.Perm.identity(2)] == hk.HeckeElt.one(2)
    assert nb[s1] == hk.HeckeElt.generator(2, 1) - hk.HeckeElt.one(2).scale(GAP)
    for n in (3, 4):
        nb = hk.negative_basis_matrix(n)
        for w, x in nb.items():
            lift = hk.braid_to_hecke(hk.BraidWord.positive_lift(w.inverse()))
            assert x * lift == hk.HeckeElt.one(n)
            # unitriangular: only elements below w, coefficient 1 at w
            assert x.coefficient(w) == ONE
            assert all(u.bruhat_le(w) for u in x.coeffs)


def test_to_negative_basis_examples():
    s1 = hk.Perm.from_word(2, [1])
    assert hk.to_negative_basis(hk.HeckeElt.one(2)) == {hk.Perm.identity(2): ONE}
    assert hk.to_negative_basis(hk.HeckeElt.generator(2, 1)) == {s1: ONE, hk.Perm.identity(2): GAP}
    assert hk.epsilon(hk.HeckeElt.one(3)) == ONE
    assert hk.epsilon(hk.HeckeElt.generator(2, 1)) == GAP


def test_dual_anti_example():
    H = hk.HeckeElt.generator(2, 1)
    assert hk.dual_anti(H) == H - hk.HeckeElt.one(2).scale(GAP)
    assert hk.dual_anti(hk.HeckeElt.one(2)) == hk.HeckeElt.one(2)


@given(elements(3))
def test_negative_basis_round_trip(x):
    assert hk.from_negative_basis(3, hk.to_negative_basis(x)) == x


@given(elements(3), elements(3))
def test_epsilon_is_a_trace(x, y):
    assert hk.epsilon(x * y) == hk.epsilon(y * x)


@given(elements(3), elements(3))
def test_dual_anti_is_anti_involution(x, y):
    assert hk.dual_anti(x * y) == hk.dual_anti(y) * hk.dual_anti(x)
    assert hk.dual_anti(hk.dual_anti(x)) == x


def test_dual_anti_on_negative_basis():
    for w, x in hk.negative_basis_matrix(3).items():
        assert hk.dual_anti(x) == hk.braid_to_hecke(hk.BraidWord.positive_lift(w.inverse()))


def test_dual_bases():
    G = hk.symmetric_group(3)
    nb = hk.negative_basis_matrix(3)
    for w in G:
        for u in G:
            got = hk.pairing(hk.HeckeElt.basis(w), nb[u])
            assert got == (ONE if w == u else ZERO)
    assert hk.pairing(hk.HeckeElt.one(1), hk.HeckeElt.one(1)) == ONE


@pytest.mark.parametrize("n", [2, 3])
def test_pairing_half_twists(n):
    HT = hk.half_twist(n)
    HTinv = hk.braid_to_hecke(hk.BraidWord.positive_lift(hk.longest_element(n)).inverse())
    assert hk.pairing(HT, HTinv) == ONE


@given(elements(3), elements(3), elements(3))
def test_pairing_adjunction(x, y, z):
    assert hk.pairing(x * z, y) == hk.pairing(x, y * hk.dual_anti(z))
    assert hk.pairing(z * x, y) == hk.pairing(x, hk.dual_anti(z) * y)


# -- partial traces ---------------------------------------------------------------------

def test_partial_trace_constants():
    U = (ONE / (ONE - Q))
    for n in (2, 3, 4):
        c = hk.markov_constants(n)
        assert c["pi(H)"] == {0: -V}
        # forced by the axioms: pi(H^-1) = a v, not a v^-1
        assert c["pi(H^-1)"] == {1: V}
        one = hk.partial_trace(hk.HeckeElt.one(n))
        e = hk.Perm.identity(n - 1)
        assert {k: x.coefficient(e) for k, x in one.items()} == {0: U, 1: U}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_trace_of_one(n):
    tr = hk.jones_ocneanu_trace(hk.HeckeElt.one(n))
    assert sp.simplify(trace_to_sympy(tr) - unknot_trace(n)) == 0
    assert tr[0] == tr[n] == (ONE - Q) ** (-n)


def test_top_trace_vanishes_off_identity():
    for w in hk.symmetric_group(3):
        if w != hk.Perm.identity(3):
            assert hk.trace_top(hk.HeckeElt.basis(w)) == ZERO


@given(elements(3))
def test_top_trace_is_identity_coefficient(x):
    assert hk.trace_top(x) == x.coefficient(hk.Perm.identity(3)) * (ONE - Q) ** (-3)


@given(elements(3), elements(3))
def test_trace_is_a_trace(x, y):
    assert hk.jones_ocneanu_trace(x * y) == hk.jones_ocneanu_trace(y * x)


@given(elements(2), st.sampled_from([1, -1]))
def test_markov_invariance(x, sign):
    # Tr_3(x H_2^{+-1}) = c * Tr_2(x) with the engine's recorded constants
    big = x.embed(3) * (hk.HeckeElt.generator(3, 2) if sign > 0 else hk.HeckeElt.generator_inverse(3, 2))
    small = hk.jones_ocneanu_trace(x)
    got = hk.jones_ocneanu_trace(big)
    if sign > 0:
        want = {k: c * (-V) for k, c in small.items()}
    else:
        want = {k + 1: c * V for k, c in small.items()}
    assert got == want


def test_kalman_basis_and_random():
    FT = hk.full_twist(3)
    for w in hk.symmetric_group(3):
        x = hk.HeckeElt.basis(w)
        assert hk.trace_top(x * FT) == hk.trace_bottom(x)
    rng = random.Random(7)
    for _ in range(5):
        x = hk.random_element(3, rng)
        assert hk.trace_top(x * FT) == hk.trace_bottom(x)


def test_full_twist_central():
    FT = hk.full_twist(3)
    for i in (1, 2):
        H = hk.HeckeElt.generator(3, i)
        assert H * FT == FT * H


# -- HOMFLY ------------------------------------------------------------------------------

def test_homfly_unknot_and_unlink():
    assert sp.simplify(trace_to_sympy(hk.homfly(hk.BraidWord(1, ()))) - unknot_trace(1)) == 0
    assert sp.simplify(trace_to_sympy(hk.homfly(hk.BraidWord(2, ()))) - unknot_trace(2)) == 0


def test_trefoil_golden():
    got = hk.homfly(hk.BraidWord.parse(2, "1 1 1"))
    assert set(got) == set(TREFOIL_GOLDEN)
    for k, s in TREFOIL_GOLDEN.items():
        assert sp.simplify(to_sympy(got[k]) - sp.sympify(s, locals={"v": v})) == 0
    # and the golden value is what the hand skein gives
    skein = a_coefficients(trefoil_skein())
    assert all(sp.simplify(skein[k] - sp.sympify(s, locals={"v": v})) == 0 for k, s in TREFOIL_GOLDEN.items())


def test_normalized_homfly_markov_invariant():
    unknot = hk.homfly(hk.BraidWord(1, ()), normalized=True)
    assert unknot == {0: ONE}
    for n, w in [(2, "1"), (2, "-1"), (3, "1 2"), (3, "-1 2"), (3, "1 -2")]:
        assert hk.homfly(hk.BraidWord.parse(n, w), normalized=True) == unknot
    tref = hk.homfly(hk.BraidWord.parse(2, "1 1 1"), normalized=True)
    assert tref == hk.homfly(hk.BraidWord.parse(3, "1 1 1 2"), normalized=True)
    assert tref == {0: LaurentRat.from_laurent({-4: 1, 0: 1}), 1: LaurentRat.from_laurent({-2: 1})}


# -- Laurent scalars -----------------------------------------------------------------------

@st.composite
def scalars(draw):
    coeffs = draw(st.dictionaries(st.integers(-3, 3), st.integers(-4, 4), max_size=3))
    num = LaurentRat.from_laurent(coeffs)
    den = LaurentRat.from_laurent(draw(st.dictionaries(st.integers(-2, 2), st.integers(-3, 3), min_size=1,
                                                       max_size=2)))
    return num if den.is_zero() else num / den


@given(scalars(), scalars(), scalars())
def test_laurent_field_axioms(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert x * y == y * x
    if not y.is_zero():
        assert (x / y) * y == x
    assert x.bar().bar() == x
    assert sp.simplify(to_sympy(x * y) - to_sympy(x) * to_sympy(y)) == 0


def test_series_in_vinv():
    # 1/(1-q) = 1 + v^-2 + v^-4 + ...
    s = (ONE / (ONE - Q)).series_in_vinv(6)
    assert {k: c for k, c in s.items() if c} == {0: 1, 2: 1, 4: 1, 6: 1}
