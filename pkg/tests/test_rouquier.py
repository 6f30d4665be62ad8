import json
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soergelkit import bimod as bm
from soergelkit import hecke as hk
from soergelkit import rouquier as rq
from soergelkit.errors import CacheCorrupted, ChainConditionViolated, IndexOutOfRange


def braid(n, text):
    return hk.BraidWord.parse(n, text)


def is_unit(c):
    return c.terms == {0: (bm.R_module(c.n),)}


def test_generators():
    F = rq.rouquier_generator(1, 1, 2)
    assert F.summand_multiset() == {0: [((1,), 0)], 1: [((), 1)]}
    G = rq.rouquier_generator(1, -1, 2)
    assert G.summand_multiset() == {-1: [((), -1)], 0: [((1,), 0)]}
    for c in (F, G):
        c.check_d2()
        c.check_blocks()
    with pytest.raises(IndexOutOfRange):
        rq.rouquier_generator(2, 1, 2)


def test_inverse_pair_unsimplified_has_four_summands():
    b = braid(2, "1 -1")
    raw = rq.braid_to_complex(b, simplify=False)
    assert raw.size() == 4
    raw.check_d2()
    assert is_unit(rq.gaussian_eliminate(raw))
    assert is_unit(rq.braid_to_complex(b))


def test_trefoil_sizes():
    raw = rq.braid_to_complex(braid(2, "1 1 1"), simplify=False)
    assert raw.size() == 8
    small = rq.braid_to_complex(braid(2, "1 1 1"))
    small.check_d2()
    small.check_blocks()
    # one B1 in each of three degrees after reduction, plus R at the end
    assert small.size() < raw.size()


@pytest.mark.parametrize("n,text", [(3, "1 2 1"), (3, "1 -2 1"), (3, "-1 -2 -1 2"), (4, "1 2 3 -2")])
def test_d_squared(n, text):
    for simplify in (False, True):
        c = rq.braid_to_complex(braid(n, text), simplify=simplify)
        c.check_d2()
        c.check_blocks()


def test_chain_condition_detected():
    F = rq.rouquier_generator(1, 1, 2)
    G = rq.rouquier_generator(1, -1, 2)
    bad = rq.SBComplex(2, {-1: G.terms[-1], 0: G.terms[0], 1: F.terms[1]},
                       {-1: G.diff[-1], 0: F.diff[0]})
    with pytest.raises(ChainConditionViolated):
        bad.check_d2()


def test_tensor_associativity():
    n = 3
    a, b, c = (rq.rouquier_generator(i, s, n) for i, s in ((1, 1), (2, -1), (1, 1)))
    left = rq.tensor_complex(rq.tensor_complex(a, b), c)
    right = rq.tensor_complex(a, rq.tensor_complex(b, c))
    assert left.summand_multiset() == right.summand_multiset()
    assert rq.gaussian_eliminate(left).summand_multiset() == rq.gaussian_eliminate(right).summand_multiset()


words3 = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=3).map(lambda ls: hk.BraidWord(3, tuple(ls)))


@settings(max_examples=15, deadline=None)
@given(words3)
def test_braid_times_inverse_is_unit(b):
    c = rq.braid_to_complex(b * b.inverse())
    c.check_d2()
    assert is_unit(c)


def test_braid_relation_same_reduced_tables():
    # F(121) and F(212) are homotopy equivalent; the eliminator leaves the same ranks
    c1 = rq.braid_to_complex(braid(3, "1 2 1"))
    c2 = rq.braid_to_complex(braid(3, "2 1 2"))
    assert [c1.total_rank()] == [c2.total_rank()]


def test_contractible_cone_eliminates():
    c = rq.cone(rq.identity_chain_map(rq.rouquier_generator(1, 1, 2)))
    c.check_d2()
    assert rq.gaussian_eliminate(c).size() == 0


def test_shift_complex():
    F = rq.rouquier_generator(1, 1, 2)
    s = rq.shift_complex(F, 1, 2)
    assert s.summand_multiset() == {-1: [((1,), 2)], 0: [((), 3)]}
    s.check_d2()


def test_psi_maps_are_chain_maps():
    for w in hk.symmetric_group(3):
        f = rq.psi_w(w)
        f.check()
        assert f.src.summand_multiset() == rq.braid_to_complex(
            hk.BraidWord.positive_lift(w), simplify=False).summand_multiset()


@pytest.mark.parametrize("n", [2, 3])
def test_splitting_map(n):
    f = rq.splitting_map(n)
    f.check()
    rq.cone(f).check_d2()


def test_special_braids():
    assert rq.jm(3).letters == (2, 1, 1, 2)
    assert rq.ft(3).letters == (1, 1, 2, 1, 1, 2)
    assert rq.ht(3).letters in ((1, 2, 1), (2, 1, 2))
    assert hk.braid_to_hecke(rq.ft(3)) == hk.full_twist(3)


def test_dual_complex():
    b = braid(3, "1 -2")
    c = rq.braid_to_complex(b)
    d = rq.dual_complex(c)
    d.check_d2()
    d.check_blocks()
    assert d.summand_multiset() == {-t: sorted((tuple(reversed(w)), -s) for w, s in ms)
                                    for t, ms in c.summand_multiset().items()}


# -- cache ---------------------------------------------------------------------


def test_cache_round_trip(tmp_path):
    b = braid(3, "1 -2 1")
    c = rq.braid_to_complex(b)
    path = str(tmp_path / "c.json")
    rq.save_complex(c, path, "k")
    back, key = rq.load_complex(path, with_key=True)
    assert key == "k"
    assert back.summand_multiset() == c.summand_multiset()
    assert rq.complex_to_payload(back) == rq.complex_to_payload(c)


def test_cache_corruption_detected(tmp_path):
    c = rq.braid_to_complex(braid(2, "1 1"))
    path = str(tmp_path / "c.json")
    rq.save_complex(c, path)
    doc = json.load(open(path))
    doc["payload"]["summands"]["0"][0][1] += 1
    json.dump(doc, open(path, "w"))
    with pytest.raises(CacheCorrupted):
        rq.load_complex(path)
    open(path, "w").write("{not json")
    with pytest.raises(CacheCorrupted):
        rq.load_complex(path)


def test_cache_d2_revalidation(tmp_path):
    # a well-formed, correctly checksummed file whose differential is wrong
    c = rq.braid_to_complex(braid(2, "1 1"), simplify=False)
    payload = rq.complex_to_payload(c)
    for blk in payload["blocks"]:
        for row in blk[3]:
            for entry in row:
                entry[1] = [[[0, 0], "1"]]
    path = str(tmp_path / "c.json")
    doc = {"format": "soergel-kit-complex", "version": rq.CACHE_VERSION, "key": "",
           "sha256": rq._checksum(payload), "payload": payload}
    json.dump(doc, open(path, "w"))
    with pytest.raises(CacheCorrupted):
        rq.load_complex(path)


def test_cached_braid_complex_rebuilds(tmp_path, caplog):
    b = braid(3, "1 2")
    d = str(tmp_path)
    first = rq.cached_braid_complex(b, d)
    (path,) = [os.path.join(d, f) for f in os.listdir(d)]
    assert rq.cached_braid_complex(b, d).summand_multiset() == first.summand_multiset()
    open(path, "w").write("garbage")
    again = rq.cached_braid_complex(b, d)
    assert again.summand_multiset() == first.summand_multiset()
    assert any("discarding" in r.message for r in caplog.records)
    rq.load_complex(path)  # rewritten and valid


def test_cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv(rq.CACHE_ENV, str(tmp_path))
    rq.set_cache_dir(None)
    assert rq.default_cache_dir() == str(tmp_path)
    rq.cached_braid_complex(braid(2, "1"))
    assert len(os.listdir(tmp_path)) == 1
