"""
Bounded complexes of Bott-Samelson bimodules, the braid compiler, the psi
chain maps and Gaussian elimination.

Complexes are cochain complexes: ``d^t: C^t -> C^{t+1}``.  A differential is
stored blockwise, ``diff[t][(j, i)]`` being the degree-0 matrix from summand
``i`` of C^t to summand ``j`` of C^{t+1}.  Tensor products use the Koszul rule
d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy, summands ordered by (t of the left
factor, left index, right index).
"""
from __future__ import annotations

import hashlib
import heapq
import json
import logging
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

from flint import fmpq, fmpq_mat

from . import bimod as bm
from .bimod import BSBimodule, PolyMatrix, R_module
from .errors import (CacheCorrupted, ChainConditionViolated, IndexOutOfRange,
                     ShapeMismatch, StrandMismatch)
from .hecke import BraidWord, Perm, longest_element

log = logging.getLogger(__name__)

CACHE_VERSION = 1
CACHE_ENV = "SOERGELKIT_CACHE"


@dataclass
class SBComplex:
    n: int
    terms: dict = field(default_factory=dict)   # t -> tuple of BSBimodule
    diff: dict = field(default_factory=dict)    # t -> {(j, i): PolyMatrix}

    def __post_init__(self):
        self.terms = {t: tuple(s) for t, s in self.terms.items() if s}
        self.diff = {t: {k: m for k, m in blocks.items() if not m.is_zero()}
                     for t, blocks in self.diff.items()
                     if t in self.terms and t + 1 in self.terms}

    # -- shape --------------------------------------------------------
    def degrees(self) -> list:
        return sorted(self.terms)

    def summands(self, t: int) -> tuple:
        return self.terms.get(t, ())

    def size(self) -> int:
        return sum(len(s) for s in self.terms.values())

    def total_rank(self) -> int:
        return sum(m.rank for s in self.terms.values() for m in s)

    def block(self, t: int, j: int, i: int) -> PolyMatrix:
        m = self.diff.get(t, {}).get((j, i))
        if m is None:
            return PolyMatrix(self.n, self.terms[t + 1][j].rank, self.terms[t][i].rank)
        return m

    def dense_differential(self, t: int) -> PolyMatrix:
        """d^t as one matrix (rows: C^{t+1}, cols: C^t)."""
        src, tgt = self.summands(t), self.summands(t + 1)
        return bm.block_matrix(self.n, self.diff.get(t, {}),
                               [m.rank for m in tgt], [m.rank for m in src])

    # -- checks -------------------------------------------------------
    def check_d2(self):
        for t in self.degrees():
            if t + 2 not in self.terms:
                continue
            d1, d2 = self.diff.get(t, {}), self.diff.get(t + 1, {})
            if not d1 or not d2:
                continue
            prod: dict = {}
            for (k, j), B in d2.items():
                for (j2, i), A in d1.items():
                    if j2 == j:
                        key = (k, i)
                        prod[key] = prod[key] + B @ A if key in prod else B @ A
            for key, m in prod.items():
                if not m.is_zero():
                    raise ChainConditionViolated(f"d^{t + 1} d^{t} != 0 at block {key}")

    def check_blocks(self):
        """Every block is a degree-0 bimodule map."""
        for t, blocks in self.diff.items():
            for (j, i), m in blocks.items():
                bm.BimMap(self.terms[t][i], self.terms[t + 1][j], 0, m).check()

    def summand_multiset(self) -> dict:
        return {t: sorted((m.word, m.shift) for m in s) for t, s in sorted(self.terms.items())}

    def __str__(self):
        parts = []
        for t in self.degrees():
            parts.append(f"{t}: " + " + ".join(map(str, self.terms[t])))
        return "SBComplex[n=%d](%s)" % (self.n, "; ".join(parts))


def unit_complex(n: int) -> SBComplex:
    return SBComplex(n, {0: (R_module(n),)}, {})


def shift_complex(c: SBComplex, hom: int = 0, internal: int = 0) -> SBComplex:
    """c[hom](internal): terms move to t - hom, summands get shift + internal."""
    terms = {t - hom: tuple(m.shifted(internal) for m in s) for t, s in c.terms.items()}
    sign = -1 if hom % 2 else 1
    diff = {t - hom: {k: (m if sign == 1 else -m) for k, m in b.items()} for t, b in c.diff.items()}
    return SBComplex(c.n, terms, diff)


def rouquier_generator(i: int, sign: int, n: int) -> SBComplex:
    if not 1 <= i <= n - 1:
        raise IndexOutOfRange(f"generator {i} outside 1..{n - 1}")
    if sign > 0:
        b = bm.counit(i, n)
        return SBComplex(n, {0: (b.src,), 1: (b.tgt,)}, {0: {(0, 0): b.matrix}})
    u = bm.unit(i, n)
    return SBComplex(n, {-1: (u.src,), 0: (u.tgt,)}, {-1: {(0, 0): u.matrix}})


# ---------------------------------------------------------------------------
# tensor products


def _tensor_layout(a: SBComplex, b: SBComplex) -> dict:
    """t -> list of (ta, ia, tb, ib) in canonical order."""
    layout: dict = {}
    for ta in a.degrees():
        for tb in b.degrees():
            for ia in range(len(a.terms[ta])):
                for ib in range(len(b.terms[tb])):
                    layout.setdefault(ta + tb, []).append((ta, ia, tb, ib))
    for t in layout:
        layout[t].sort()
    return layout


def tensor_complex(a: SBComplex, b: SBComplex) -> SBComplex:
    if a.n != b.n:
        raise StrandMismatch(f"tensor of complexes on {a.n} and {b.n} strands")
    n = a.n
    layout = _tensor_layout(a, b)
    index = {t: {key: k for k, key in enumerate(keys)} for t, keys in layout.items()}
    terms = {t: tuple(bm.tensor(a.terms[ta][ia], b.terms[tb][ib]) for ta, ia, tb, ib in keys)
             for t, keys in layout.items()}
    diff: dict = {}
    for t, keys in layout.items():
        if t + 1 not in layout:
            continue
        blocks = diff.setdefault(t, {})
        nxt = index[t + 1]
        for k, (ta, ia, tb, ib) in enumerate(keys):
            A = a.terms[ta][ia]
            B = b.terms[tb][ib]
            # d_a (x) id
            for (ja, ia2), m in a.diff.get(ta, {}).items():
                if ia2 != ia:
                    continue
                j = nxt[(ta + 1, ja, tb, ib)]
                blocks[(j, k)] = _acc(blocks.get((j, k)), m.kron_identity(B.rank))
            # (-1)^ta id (x) d_b
            for (jb, ib2), m in b.diff.get(tb, {}).items():
                if ib2 != ib:
                    continue
                j = nxt[(ta, ia, tb + 1, jb)]
                mm = bm.tensor_matrices(PolyMatrix.identity(n, A.rank), A, m)
                if ta % 2:
                    mm = -mm
                blocks[(j, k)] = _acc(blocks.get((j, k)), mm)
    return SBComplex(n, terms, diff)


def _acc(old, new):
    return new if old is None else old + new


# ---------------------------------------------------------------------------
# chain maps


@dataclass
class ChainMap:
    """Blocks ``maps[t][(j, i)]`` from summand i of src^t to summand j of tgt^{t + hdeg}."""

    src: SBComplex
    tgt: SBComplex
    maps: dict
    hdeg: int = 0
    degree: int = 0

    def check(self):
        """d f = (-1)^hdeg f d, blockwise."""
        sign = -1 if self.hdeg % 2 else 1
        for t in set(self.src.degrees()) | {t - 1 for t in self.src.degrees()}:
            lhs = _compose_blocks(self.tgt.diff.get(t + self.hdeg, {}), self.maps.get(t, {}))
            rhs = _compose_blocks(self.maps.get(t + 1, {}), self.src.diff.get(t, {}))
            keys = set(lhs) | set(rhs)
            for key in keys:
                l = lhs.get(key)
                r = rhs.get(key)
                if r is not None and sign == -1:
                    r = -r
                diffm = (l if l is not None else r.scale(0)) - (r if r is not None else l.scale(0))
                if not diffm.is_zero():
                    raise ChainConditionViolated(f"chain map condition fails in degree {t} block {key}")


def _compose_blocks(outer: Mapping, inner: Mapping) -> dict:
    out: dict = {}
    for (k, j), B in outer.items():
        for (j2, i), A in inner.items():
            if j == j2:
                out[(k, i)] = _acc(out.get((k, i)), B @ A)
    return out


def identity_chain_map(c: SBComplex) -> ChainMap:
    maps = {t: {(i, i): PolyMatrix.identity(c.n, m.rank) for i, m in enumerate(s)} for t, s in c.terms.items()}
    return ChainMap(c, c, maps)


def tensor_chain_maps(f: ChainMap, g: ChainMap) -> ChainMap:
    """f (x) g for homological-degree-0 maps."""
    if f.hdeg or g.hdeg:
        raise ShapeMismatch("only homological degree 0 maps are tensored")
    src = tensor_complex(f.src, g.src)
    tgt = tensor_complex(f.tgt, g.tgt)
    ls = _tensor_layout(f.src, g.src)
    lt = _tensor_layout(f.tgt, g.tgt)
    it = {t: {key: k for k, key in enumerate(keys)} for t, keys in lt.items()}
    maps: dict = {}
    for t, keys in ls.items():
        for k, (ta, ia, tb, ib) in enumerate(keys):
            for (ja, ia2), F in f.maps.get(ta, {}).items():
                if ia2 != ia:
                    continue
                for (jb, ib2), G in g.maps.get(tb, {}).items():
                    if ib2 != ib:
                        continue
                    j = it[t][(ta, ja, tb, jb)]
                    mm = bm.tensor_matrices(F, f.tgt.terms[ta][ja], G)
                    maps.setdefault(t, {})[(j, k)] = _acc(maps.get(t, {}).get((j, k)), mm)
    return ChainMap(src, tgt, maps, 0, f.degree + g.degree)


def cone(f: ChainMap) -> SBComplex:
    """Cone^t = src^{t+1} + tgt^t with d = [[-d_src, 0], [f, d_tgt]]."""
    if f.hdeg:
        raise ShapeMismatch("cone of a map of nonzero homological degree")
    A, B = f.src, f.tgt
    degs = sorted({t - 1 for t in A.degrees()} | set(B.degrees()))
    terms = {t: A.summands(t + 1) + B.summands(t) for t in degs}
    diff: dict = {}
    for t in degs:
        na = len(A.summands(t + 1))
        na2 = len(A.summands(t + 2))
        blocks = {}
        for (j, i), m in A.diff.get(t + 1, {}).items():
            blocks[(j, i)] = -m
        for (j, i), m in f.maps.get(t + 1, {}).items():
            blocks[(na2 + j, i)] = m
        for (j, i), m in B.diff.get(t, {}).items():
            blocks[(na2 + j, na + i)] = m
        if blocks:
            diff[t] = blocks
    return SBComplex(A.n, terms, diff)


# ---------------------------------------------------------------------------
# Gaussian elimination


def _constant(f) -> fmpq:
    return f.coeffs()[0] if f != 0 else fmpq(0)


def invert_endomorphism(m: PolyMatrix, obj: BSBimodule) -> PolyMatrix | None:
    """Inverse of a degree-0 endomorphism of ``obj`` (None if not invertible).

    Entries between equal-degree basis vectors are constants (the part D);
    the rest N strictly raises degree, so m^{-1} = sum_k (-D^{-1} N)^k D^{-1}.
    """
    k = m.nrows
    degs = obj.degrees
    Dm = fmpq_mat(k, k)
    N = PolyMatrix(m.n, k, k)
    for a, r in enumerate(m.rows):
        for b, f in r.items():
            if degs[a] == degs[b]:
                Dm[a, b] = _constant(f)
            else:
                N.rows[a][b] = f
    if Dm.rank() < k:
        return None
    Di = Dm.inv()
    Dinv = PolyMatrix(m.n, k, k)
    for a in range(k):
        for b in range(k):
            c = Di[a, b]
            if c != 0:
                Dinv.rows[a][b] = bm.const(m.n, c)
    step = -(Dinv @ N)
    term = Dinv
    total = Dinv
    for _ in range(len(obj.word) + 2):
        term = step @ term
        if term.is_zero():
            break
        total = total + term
    return total


class _Work:
    """Mutable copy of a complex with summands addressed by stable ids."""

    def __init__(self, c: SBComplex):
        self.n = c.n
        self.obj: dict = {}
        self.tdeg: dict = {}
        self.out: dict = {}
        self.inc: dict = {}
        ids = {}
        nid = 0
        for t in c.degrees():
            for i, m in enumerate(c.terms[t]):
                ids[(t, i)] = nid
                self.obj[nid] = m
                self.tdeg[nid] = t
                self.out[nid] = {}
                self.inc[nid] = {}
                nid += 1
        self.next_id = nid
        for t, blocks in c.diff.items():
            for (j, i), m in blocks.items():
                self.set(ids[(t, i)], ids[(t + 1, j)], m)

    def add_obj(self, m: BSBimodule, t: int) -> int:
        k = self.next_id
        self.next_id += 1
        self.obj[k] = m
        self.tdeg[k] = t
        self.out[k] = {}
        self.inc[k] = {}
        return k

    def set(self, s: int, t: int, m: PolyMatrix | None):
        if m is None or m.is_zero():
            self.out[s].pop(t, None)
            self.inc[t].pop(s, None)
        else:
            self.out[s][t] = m
            self.inc[t][s] = m

    def remove(self, k: int):
        for t in list(self.out[k]):
            self.inc[t].pop(k, None)
        for s in list(self.inc[k]):
            self.out[s].pop(k, None)
        for d in (self.obj, self.tdeg, self.out, self.inc):
            del d[k]

    def freeze(self) -> SBComplex:
        by_t: dict = {}
        for k in sorted(self.obj):
            by_t.setdefault(self.tdeg[k], []).append(k)
        pos = {k: i for ks in by_t.values() for i, k in enumerate(ks)}
        terms = {t: tuple(self.obj[k] for k in ks) for t, ks in by_t.items()}
        diff: dict = {}
        for s, outs in self.out.items():
            for t, m in outs.items():
                diff.setdefault(self.tdeg[s], {})[(pos[t], pos[s])] = m
        return SBComplex(self.n, terms, diff)


@lru_cache(maxsize=None)
def _split_matrices(n: int, left: tuple, i: int, right: tuple) -> tuple:
    L, Rt = BSBimodule(n, left), BSBimodule(n, right)
    (p1, p2), (i1, i2) = bm.splitting_iso(i, n)
    return tuple(bm.whisker(L, f, Rt).matrix for f in (p1, p2, i1, i2))


def split_repeats(c: SBComplex) -> SBComplex:
    """Rewrite every summand X B_i B_i Y (s) as X B_i Y (s+1) + X B_i Y (s-1)."""
    w = _Work(c)
    _split_repeats_work(w)
    return w.freeze()


def _first_repeat(word: tuple):
    for k in range(len(word) - 1):
        if word[k] == word[k + 1]:
            return k
    return None


def _split_repeats_work(w: _Work):
    queue = sorted(w.obj)
    while queue:
        k = queue.pop(0)
        if k not in w.obj:
            continue
        m = w.obj[k]
        pos = _first_repeat(m.word)
        if pos is None:
            continue
        left, i, right = m.word[:pos], m.word[pos], m.word[pos + 2:]
        p1, p2, i1, i2 = _split_matrices(m.n, left, i, right)
        word = left + (i,) + right
        t = w.tdeg[k]
        a = w.add_obj(BSBimodule(m.n, word, m.shift + 1), t)
        b = w.add_obj(BSBimodule(m.n, word, m.shift - 1), t)
        for s, M in list(w.inc[k].items()):
            w.set(s, a, p1 @ M)
            w.set(s, b, p2 @ M)
        for u, M in list(w.out[k].items()):
            w.set(a, u, M @ i1)
            w.set(b, u, M @ i2)
        w.remove(k)
        queue.extend([a, b])


def gaussian_eliminate(c: SBComplex, split: bool = True, check: bool = False) -> SBComplex:
    """Cancel invertible blocks between equal summands until none remain.

    Pivots are taken smallest rank first, then by (homological degree, summand
    id).  With ``split`` adjacent repeated letters are first rewritten via
    B_i B_i = B_i(1) + B_i(-1).
    """
    if check:
        c.check_d2()
    w = _Work(c)
    if split:
        _split_repeats_work(w)
    heap: list = []
    inv_cache: dict = {}

    def push(s, t):
        m = w.out[s].get(t)
        if m is None or w.obj[s] != w.obj[t]:
            return
        heapq.heappush(heap, (w.obj[s].rank, w.tdeg[s], s, t))

    for s in list(w.out):
        for t in w.out[s]:
            push(s, t)
    while heap:
        _, _, s, t = heapq.heappop(heap)
        if s not in w.obj or t not in w.obj:
            continue
        phi = w.out[s].get(t)
        if phi is None:
            continue
        cached = inv_cache.get((s, t))
        if cached is not None and cached[0] is phi:
            inv = cached[1]
        else:
            inv = invert_endomorphism(phi, w.obj[s])
            inv_cache[(s, t)] = (phi, inv)
        if inv is None:
            continue
        deltas = [(a, M) for a, M in w.inc[t].items() if a != s]
        gammas = [(b, M) for b, M in w.out[s].items() if b != t]
        for b, G in gammas:
            Gi = G @ inv
            for a, Dl in deltas:
                old = w.out[a].get(b)
                upd = Gi @ Dl
                new = -upd if old is None else old - upd
                w.set(a, b, new)
                push(a, b)
        w.remove(s)
        w.remove(t)
    out = w.freeze()
    if check:
        out.check_d2()
    return out


# ---------------------------------------------------------------------------
# braids


def braid_to_complex(b: BraidWord, simplify: bool = True) -> SBComplex:
    """F(b): tensor of generator complexes left to right, reduced after each step if asked."""
    c = unit_complex(b.n)
    for k in b.letters:
        c = tensor_complex(c, rouquier_generator(abs(k), 1 if k > 0 else -1, b.n))
        if simplify:
            c = gaussian_eliminate(c)
    return c


def jm(n: int) -> BraidWord:
    if n <= 1:
        return BraidWord(max(n, 1), ())
    inner = jm(n - 1).letters
    return BraidWord(n, (n - 1,) + inner + (n - 1,))


def ft(n: int) -> BraidWord:
    letters: tuple = ()
    for k in range(2, n + 1):
        letters += jm(k).letters
    return BraidWord(n, letters)


def ht(n: int) -> BraidWord:
    return BraidWord.positive_lift(longest_element(n))


def special_braids(n: int) -> dict:
    return {"ht": ht(n), "ft": ft(n), "jm": jm(n)}


# ---------------------------------------------------------------------------
# psi maps


def psi_generator(i: int, n: int) -> ChainMap:
    """F_i -> F_i^{-1}: the identity of B_i in homological degree 0."""
    src = rouquier_generator(i, 1, n)
    tgt = rouquier_generator(i, -1, n)
    return ChainMap(src, tgt, {0: {(0, 0): PolyMatrix.identity(n, 2)}})


def psi_w(w: Perm) -> ChainMap:
    """F_w -> F_{w^{-1}}^{-1}: tensor of psi_i along the reduced word (unreduced complexes)."""
    f = identity_chain_map(unit_complex(w.n))
    for i in w.reduced_word:
        f = tensor_chain_maps(f, psi_generator(i, w.n))
    return f


def splitting_map(n: int) -> ChainMap:
    """L_n -> [R]: zero except on the all-B term, where it is the nested cap."""
    src = braid_to_complex(jm(n), simplify=False)
    tgt = unit_complex(n)
    if n <= 1:
        return identity_chain_map(tgt)
    half = BSBimodule(n, tuple(range(1, n)))
    ev = bm.evaluation(half)
    (k,) = [k for k, m in enumerate(src.terms[0]) if m.word == jm(n).letters]
    return ChainMap(src, tgt, {0: {(0, k): ev.matrix}})


# ---------------------------------------------------------------------------
# duals


def dual_complex(c: SBComplex) -> SBComplex:
    """(C^dual)^t = (C^{-t})^dual, differential (d^{-t-1})^dual."""
    terms = {-t: tuple(bm.dual(m) for m in s) for t, s in c.terms.items()}
    diff: dict = {}
    for t, blocks in c.diff.items():
        for (j, i), m in blocks.items():
            f = bm.dual_map(bm.BimMap(c.terms[t][i], c.terms[t + 1][j], 0, m))
            diff.setdefault(-t - 1, {})[(i, j)] = f.matrix
    return SBComplex(c.n, terms, diff)


# ---------------------------------------------------------------------------
# on-disk cache


def _poly_to_json(f) -> list:
    return [[[int(e) for e in m], str(c)] for m, c in zip(f.monoms(), f.coeffs())]


def _poly_from_json(n: int, data: list):
    if not data:
        return bm.const(n, 0)
    return bm.ring(n).from_dict({tuple(m): fmpq(*map(int, c.split("/"))) if "/" in c else fmpq(int(c))
                                 for m, c in data})


def complex_to_payload(c: SBComplex) -> dict:
    summands = {str(t): [[list(m.word), m.shift] for m in s] for t, s in sorted(c.terms.items())}
    blocks = []
    for t in sorted(c.diff):
        for (j, i) in sorted(c.diff[t]):
            m = c.diff[t][(j, i)]
            # CSR: per row, list of (col, poly)
            csr = [[[col, _poly_to_json(f)] for col, f in sorted(r.items())] for r in m.rows]
            blocks.append([t, j, i, csr])
    return {"n": c.n, "summands": summands, "blocks": blocks}


def complex_from_payload(p: dict) -> SBComplex:
    n = p["n"]
    terms = {int(t): tuple(BSBimodule(n, tuple(w), s) for w, s in lst) for t, lst in p["summands"].items()}
    diff: dict = {}
    for t, j, i, csr in p["blocks"]:
        m = PolyMatrix(n, terms[t + 1][j].rank, terms[t][i].rank)
        for r, row in enumerate(csr):
            for col, poly in row:
                m.rows[r][col] = _poly_from_json(n, poly)
        diff.setdefault(t, {})[(j, i)] = m
    return SBComplex(n, terms, diff)


def _checksum(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def save_complex(c: SBComplex, path: str, key: str = ""):
    payload = complex_to_payload(c)
    doc = {"format": "soergel-kit-complex", "version": CACHE_VERSION, "key": key,
           "sha256": _checksum(payload), "payload": payload}
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
    os.replace(tmp, path)


def load_complex(path: str, with_key: bool = False):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise CacheCorrupted(f"{path}: not valid JSON ({e})") from None
    if doc.get("format") != "soergel-kit-complex" or doc.get("version") != CACHE_VERSION:
        raise CacheCorrupted(f"{path}: unsupported format/version")
    if _checksum(doc["payload"]) != doc.get("sha256"):
        raise CacheCorrupted(f"{path}: checksum mismatch")
    c = complex_from_payload(doc["payload"])
    try:
        c.check_d2()
    except ChainConditionViolated as e:
        raise CacheCorrupted(f"{path}: {e}") from None
    return (c, doc.get("key", "")) if with_key else c


_cache_override: str | None = None


def set_cache_dir(path: str | None):
    """Process-wide cache directory; None falls back to $SOERGELKIT_CACHE."""
    global _cache_override
    _cache_override = path


def default_cache_dir() -> str | None:
    return _cache_override or os.environ.get(CACHE_ENV) or None


def cached_braid_complex(b: BraidWord, cache_dir: str | None = None) -> SBComplex:
    """braid_to_complex with an optional on-disk cache keyed by the braid.

    A file that fails revalidation is logged and rebuilt, so a bad cache can
    cost time but never change a result.
    """
    cache_dir = cache_dir if cache_dir is not None else default_cache_dir()
    if not cache_dir:
        return braid_to_complex(b)
    os.makedirs(cache_dir, exist_ok=True)
    key = f"n{b.n}_" + ("_".join(map(str, b.letters)) or "e")
    path = os.path.join(cache_dir, hashlib.sha1(key.encode()).hexdigest()[:16] + ".json")
    if os.path.exists(path):
        try:
            c, stored = load_complex(path, with_key=True)
            if stored == key:
                return c
            log.warning("cache key mismatch in %s (%s != %s); rebuilding", path, stored, key)
        except CacheCorrupted as e:
            log.warning("discarding cached complex: %s", e)
    c = braid_to_complex(b)
    save_complex(c, path, key)
    return c
