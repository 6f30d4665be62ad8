"""
Hochschild (co)homology of Bott-Samelson complexes, triply graded tables,
partial traces on complexes and the duality checks built on them.

Conventions
-----------
* Internal degree d, with M(k)_d = M_{d+k} and deg x_j = 2.
* Koszul generators theta_j carry Hochschild degree 1 and internal degree -2,
  so HH^0(M) is the subspace of M of elements commuting with every x_j, in
  their own degree.  Column a of the slice in degree d is
  ``C_{d+2a} (x) Lambda^a``.
* HH_k(M) = HH^{n-k}(M)(-2n), i.e. HH_k(M)_d = HH^{n-k}(M)_{d-2n}.
* The normalised a-grading is HH~^k(M) = HH^k(M)(-2k).
* In Euler characteristics degree d contributes v^{-d} (so q = v^{-2}
  contributes degree 2, and v <-> (1)).
* HHH is iterated homology: Koszul homology of each chain group first, then
  homology along the braid direction of the induced maps.

Every homology dimension is assembled from ranks only: with delta the Koszul
(or partial trace) operator and D the chain differential, the induced map on
delta-homology has rank rank[[delta_t, 0], [D_t, delta'_{t+1}]] - rank
delta_t - rank delta'_{t+1}.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from . import bimod as bm
from . import exactla as la
from . import hecke as hk
from . import rouquier as rq
from .bimod import BSBimodule, PolyMatrix
from .errors import CutoffTooLow, NotFreeBelowCutoff, StrandMismatch
from .laurent import LaurentRat

SCHEMA = "soergel-kit/1"

CONVENTIONS = {
    "grading": "M(k)_d = M_{d+k}; deg x_j = 2; generator of R(1) in degree -1",
    "v_q": "degree d <-> v^{-d}; q = v^{-2}; v <-> (1)",
    "theta": "Koszul theta_j: Hochschild degree 1, internal degree -2",
    "hh_lower": "HH_k(M) = HH^{n-k}(M)(-2n)",
    "normalized_a": "HH~^k(M) = HH^k(M)(-2k)",
    "hhh": "iterated homology: Koszul first, then homological direction",
    "table_keys": "a:t:d (Hochschild degree, homological degree, internal degree)",
}


@dataclass(frozen=True)
class SliceRequest:
    cutoff: int = 14
    p: int | None = None
    a_degrees: tuple | None = None     # None: all 0..n
    normalized: bool = False
    workers: int = 1
    reduced: bool = True               # factor out Q[e_1]; False runs the literal computation

    def __post_init__(self):
        if self.cutoff % 2:
            raise ValueError("cutoff must be even")


@dataclass
class PoincareTable:
    """(a, t, d) -> dimension, exact for d <= cutoff (d as stored)."""

    n: int
    cutoff: int
    entries: dict = field(default_factory=dict)
    normalized: bool = False

    def __post_init__(self):
        self.entries = {k: v for k, v in self.entries.items() if v}

    def get(self, a: int, t: int, d: int) -> int:
        return self.entries.get((a, t, d), 0)

    def column(self, a: int) -> dict:
        """(t, d) -> dim for one Hochschild degree."""
        return {(t, d): v for (k, t, d), v in self.entries.items() if k == a}

    def normalize(self) -> "PoincareTable":
        """HH^k -> HH~^k = HH^k(-2k): degree d moves to d + 2k."""
        if self.normalized:
            return self
        return PoincareTable(self.n, self.cutoff, {(a, t, d + 2 * a): v for (a, t, d), v in self.entries.items()},
                             True)

    def to_json(self) -> dict:
        return {f"{a}:{t}:{d}": v for (a, t, d), v in sorted(self.entries.items())}

    def __eq__(self, other):
        if not isinstance(other, PoincareTable):
            return NotImplemented
        return (self.n, self.cutoff, self.entries, self.normalized) == \
            (other.n, other.cutoff, other.entries, other.normalized)


# ---------------------------------------------------------------------------
# slices
#
# e_1 = x_1 + ... + x_n is symmetric, so every Bott-Samelson bimodule and every
# structure map is (reduced part) (x) Q[e_1], with e_1 acting the same on both
# sides.  By Kunneth, HH over R is HH over R/(e_1) (n - 1 Koszul generators)
# tensored with Q[e_1] (x) Lambda[eta], eta in Hochschild degree 1 and internal
# degree -2; partial traces and plain homology just pick up the factor Q[e_1].
# ``reduced=False`` runs the literal computation over all n variables.


class _Reducer:
    """Slice geometry: number of polynomial variables and the matrix transform."""

    def __init__(self, n: int, reduced: bool):
        self.n = n
        self.reduced = reduced and n >= 1
        self.nv = n - 1 if self.reduced else n
        self._cache: dict = {}

    def __call__(self, P: PolyMatrix) -> PolyMatrix:
        if not self.reduced:
            return P
        hit = self._cache.get(id(P))
        if hit is not None and hit[0] is P:
            return hit[1]
        Q = P.reduce_center()
        self._cache[id(P)] = (P, Q)
        return Q

    def dim(self, m: BSBimodule, d: int) -> int:
        return len(bm.slice_basis(self.nv, m.degrees, d))


@lru_cache(maxsize=None)
def _koszul_operator(n: int, word: tuple, j: int) -> PolyMatrix:
    """x_j (left) minus X'_j (right) on the unshifted word."""
    m = BSBimodule(n, word)
    return PolyMatrix.scalar(n, m.rank, bm.x(n, j)) - m.X[j - 1]


@lru_cache(maxsize=None)
def _reduced_koszul_operator(n: int, word: tuple, j: int) -> PolyMatrix:
    return _koszul_operator(n, word, j).reduce_center()


_COL_CACHE: dict = {}


def _cols(P: PolyMatrix, src: BSBimodule, tgt: BSBimodule, d: int, dd: int, p) -> list:
    """Slice columns of the left-linear map P from src_d to tgt_{d+dd}."""
    key = (id(P), src.degrees, tgt.degrees, d, dd, p)
    hit = _COL_CACHE.get(key)
    if hit is not None and hit[0] is P:
        return hit[1]
    cols = bm.slice_rows(P, src.degrees, tgt.degrees, d, dd, p)
    if len(_COL_CACHE) > 200000:
        _COL_CACHE.clear()
    _COL_CACHE[key] = (P, cols)
    return cols


def clear_caches():
    _COL_CACHE.clear()


def _shift_vec(vec: dict, off: int, sign: int = 1, p=None) -> dict:
    if sign == 1:
        return {k + off: v for k, v in vec.items()}
    if p is None:
        return {k + off: -v for k, v in vec.items()}
    return {k + off: (-v) % p for k, v in vec.items()}


def _add_into(acc: dict, vec: dict, p):
    for k, v in vec.items():
        s = acc.get(k, 0) + v
        if p is not None:
            s %= p
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)


class _Slicer:
    """Slices of the chain groups of a complex, plus the chain differential."""

    def __init__(self, c: rq.SBComplex, p=None, reduced: bool = True):
        self.c = c
        self.n = c.n
        self.p = p
        self.red = _Reducer(c.n, reduced)

    def offsets(self, t: int, d: int) -> tuple:
        offs, k = [], 0
        for m in self.c.summands(t):
            offs.append(k)
            k += self.red.dim(m, d)
        return offs, k

    def dim(self, t: int, d: int) -> int:
        return self.offsets(t, d)[1]

    def chain_parts(self, t: int, d: int) -> list:
        """Per source summand i: [(target offset, columns)] for the blocks of d^t."""
        offs, _ = self.offsets(t + 1, d)
        tsum = self.c.summands(t + 1)
        by_src: dict = {}
        for (j, i), M in self.c.diff.get(t, {}).items():
            by_src.setdefault(i, []).append((j, M))
        out = []
        for i, m in enumerate(self.c.summands(t)):
            out.append([(offs[j], _cols(self.red(M), m, tsum[j], d, 0, self.p)) for j, M in by_src.get(i, ())])
        return out

    def chain(self, t: int, d: int, row_offset: int = 0) -> list:
        out = []
        for i, per in enumerate(self.chain_parts(t, d)):
            m = self.c.summands(t)[i]
            for b in range(self.red.dim(m, d)):
                acc: dict = {}
                for off, cols in per:
                    _add_into(acc, _shift_vec(cols[b], off + row_offset), self.p)
                out.append(acc)
        return out

    def operator(self, m: BSBimodule, j: int) -> PolyMatrix:
        if self.red.reduced:
            return _reduced_koszul_operator(self.n, m.word, j)
        return _koszul_operator(self.n, m.word, j)


class KoszulSlicer(_Slicer):
    """Koszul columns K^a_t(d) = sum_{|S|=a} sum_i C^t_i in degree d + 2a."""

    def __init__(self, c: rq.SBComplex, p=None, reduced: bool = True):
        super().__init__(c, p, reduced)
        self.kn = self.red.nv if self.red.reduced else c.n
        self.subsets = {a: list(itertools.combinations(range(1, self.kn + 1), a)) for a in range(self.kn + 1)}

    def space_size(self, t: int, a: int, d: int) -> int:
        if a < 0 or a > self.kn:
            return 0
        return len(self.subsets[a]) * self.dim(t, d + 2 * a)

    def _subset_offset(self, t: int, a: int, d: int) -> dict:
        block = self.dim(t, d + 2 * a)
        return {S: k * block for k, S in enumerate(self.subsets[a])}

    def delta(self, t: int, a: int, d: int) -> list:
        """Columns of the Koszul map K^a_t(d) -> K^{a+1}_t(d)."""
        if a < 0 or a > self.kn:
            return []
        if a == self.kn:
            return [dict() for _ in range(self.space_size(t, a, d))]
        e = d + 2 * a
        soff = self._subset_offset(t, a + 1, d)
        offs, _ = self.offsets(t, e + 2)
        out = []
        for S in self.subsets[a]:
            for i, m in enumerate(self.c.summands(t)):
                per_j = []
                for j in range(1, self.kn + 1):
                    if j in S:
                        continue
                    sign = -1 if sum(1 for s in S if s < j) % 2 else 1
                    T = tuple(sorted(S + (j,)))
                    cols = _cols(self.operator(m, j), m, m, e, 2, self.p)
                    per_j.append((soff[T] + offs[i], sign, cols))
                for b in range(self.red.dim(m, e)):
                    acc: dict = {}
                    for off, sign, cols in per_j:
                        _add_into(acc, _shift_vec(cols[b], off, sign, self.p), self.p)
                    out.append(acc)
        return out

    def koszul_chain(self, t: int, a: int, d: int, row_offset: int = 0) -> list:
        """Columns of D: K^a_t(d) -> K^a_{t+1}(d)."""
        if a < 0 or a > self.kn:
            return []
        e = d + 2 * a
        soff = self._subset_offset(t + 1, a, d)
        out = []
        for S in self.subsets[a]:
            out.extend(self.chain(t, e, row_offset + soff[S]))
        return out


def _rank(cols: list, p) -> int:
    return la.rank_of_vectors(cols, p)


def _stack(top: list, top_rows: int, bottom: list) -> list:
    """Columns of [[top], [bottom]] given equally many columns."""
    out = []
    for u, w in zip(top, bottom):
        if w:
            u = dict(u)
            for k, v in w.items():
                u[k + top_rows] = v
        out.append(u)
    return out


def iterated_homology(dims: Mapping[int, int], out_rank: Callable, in_rank: Callable,
                      combined_rank: Callable) -> dict:
    """Homology along t of the maps induced on delta-homology.

    dims[t]            dimension of the middle space at t
    out_rank(t)        rank of delta leaving it
    in_rank(t)         rank of delta entering it
    combined_rank(t)   rank of [[delta_out_t, 0], [D_t, delta_in_{t+1}]]
    """
    ts = sorted(dims)
    V = {t: dims[t] - out_rank(t) - in_rank(t) for t in ts}
    f = {}
    for t in ts:
        if t + 1 in dims and V[t] and V[t + 1]:
            f[t] = combined_rank(t) - out_rank(t) - in_rank(t + 1)
        else:
            f[t] = 0
    return {t: V[t] - f[t] - f.get(t - 1, 0) for t in ts}


def _min_degree(c: rq.SBComplex) -> int:
    degs = [g for s in c.terms.values() for m in s for g in m.degrees]
    return min(degs) if degs else 0


def hhh_slice(c: rq.SBComplex, d: int, a_degrees: Iterable[int], p=None, reduced: bool = True) -> dict:
    """{(a, t): dim} of Koszul-then-t homology in internal degree d.

    With ``reduced`` this is the table over R/(e_1) (Hochschild degrees 0..n-1).
    """
    ks = KoszulSlicer(c, p, reduced)
    ts = c.degrees()
    rk: dict = {}

    def delta_rank(t, a):
        key = (t, a)
        if key not in rk:
            rk[key] = _rank(ks.delta(t, a, d), p) if 0 <= a < ks.kn else 0
        return rk[key]

    out = {}
    for a in a_degrees:
        if a < 0 or a > ks.kn:
            continue
        dims = {t: ks.space_size(t, a, d) for t in ts}
        if not any(dims.values()):
            continue

        def combined(t, a=a):
            top = ks.delta(t, a, d)
            top_rows = ks.space_size(t, a + 1, d)
            left = _stack(top, top_rows, ks.koszul_chain(t, a, d))
            right = [_shift_vec(col, top_rows) for col in ks.delta(t + 1, a - 1, d)] if a > 0 else []
            return _rank(left + right, p)

        h = iterated_homology(dims, lambda t: delta_rank(t, a), lambda t: delta_rank(t, a - 1), combined)
        for t, v in h.items():
            if v:
                out[(a, t)] = v
    return out


def _map_degrees(fn, degrees, workers: int):
    degrees = list(degrees)
    if workers <= 1 or len(degrees) <= 1:
        return [fn(d) for d in degrees]
    import multiprocessing as mp
    global _FORK_FN
    _FORK_FN = fn
    ctx = mp.get_context("fork")
    # largest slices first so the pool stays busy; results are merged by degree
    order = sorted(range(len(degrees)), key=lambda k: -degrees[k])
    with ctx.Pool(workers) as pool:
        res = pool.map(_fork_call, [degrees[k] for k in order], chunksize=1)
    _FORK_FN = None
    out = [None] * len(degrees)
    for k, r in zip(order, res):
        out[k] = r
    return out


_FORK_FN = None


def _fork_call(d):
    return _FORK_FN(d)


def hhh(c: rq.SBComplex, req: SliceRequest = SliceRequest()) -> PoincareTable:
    """Triply graded table: HH^a applied termwise, then homology in t.  Exact for d <= cutoff."""
    c.check_d2()
    n = c.n
    want = tuple(range(n + 1)) if req.a_degrees is None else tuple(req.a_degrees)
    lo = _min_degree(c) - 2 * n
    if req.cutoff < lo:
        raise CutoffTooLow(f"cutoff {req.cutoff} is below the lowest degree {lo} of the input")
    if not req.reduced:
        degrees = list(range(lo, req.cutoff + 1))
        results = _map_degrees(lambda d: hhh_slice(c, d, want, req.p, False), degrees, req.workers)
        entries = {(a, t, d): v for d, res in zip(degrees, results) for (a, t), v in res.items()}
    else:
        red_a = tuple(sorted({a - e for a in want for e in (0, 1)} & set(range(n))))
        # eta has internal degree -2, so reduced degrees up to cutoff + 2 are needed
        degrees = list(range(lo, req.cutoff + 3))
        results = _map_degrees(lambda d: hhh_slice(c, d, red_a, req.p, True), degrees, req.workers)
        red = {(a, t, d): v for d, res in zip(degrees, results) for (a, t), v in res.items()}
        entries = {}
        for (a, t, d), v in red.items():
            for eps in (0, 1):
                if a + eps not in want:
                    continue
                dd = d - 2 * eps
                while dd <= req.cutoff:
                    key = (a + eps, t, dd)
                    entries[key] = entries.get(key, 0) + v
                    dd += 2
    table = PoincareTable(n, req.cutoff, entries)
    return table.normalize() if req.normalized else table


def hh_bimodule(m: BSBimodule, req: SliceRequest = SliceRequest()) -> PoincareTable:
    """HH^a of a single bimodule, as a table with t = 0."""
    return hhh(rq.SBComplex(m.n, {0: (m,)}, {}), req)


def _columns_to_matrix(cols: list, nrows: int, p=None) -> la.SparseMatrix:
    return la.SparseMatrix.from_entries(nrows, len(cols), (((r, c), v) for c, col in enumerate(cols)
                                                          for r, v in col.items()), p)


def koszul_slice(m: BSBimodule, d: int, p=None) -> la.FiniteComplex:
    """The literal Koszul complex M (x) Lambda(theta_1..theta_n) in internal degree d.

    Column a is M_{d+2a} (x) Lambda^a; its homology at a is HH^a(M)_d.
    """
    ks = KoszulSlicer(rq.SBComplex(m.n, {0: (m,)}, {}), p, reduced=False)
    dims = {a: ks.space_size(0, a, d) for a in range(m.n + 1)}
    diffs = {a: _columns_to_matrix(ks.delta(0, a, d), dims[a + 1], p) for a in range(m.n)}
    return la.FiniteComplex(dims, diffs)


def hochschild_homology_slice(m: BSBimodule, d: int, p=None) -> dict:
    """k -> dim HH_k(M)_d from the Koszul chain complex, independent of HH^*.

    Column k is M_{d-2k} (x) Lambda^k (theta_j of degree +2 here) with
    m theta_S -> sum_{j in S} +-(x_j m - m x_j) theta_{S - j}.
    """
    n = m.n
    red = _Reducer(n, False)
    subsets = {k: list(itertools.combinations(range(1, n + 1), k)) for k in range(n + 1)}
    block = {k: red.dim(m, d - 2 * k) for k in range(n + 1)}
    size = {k: len(subsets[k]) * block[k] for k in range(n + 1)}

    def boundary(k):
        # columns of Lambda^k -> Lambda^{k-1}
        pos = {S: a * block[k - 1] for a, S in enumerate(subsets[k - 1])}
        out = []
        for S in subsets[k]:
            parts = []
            for idx, j in enumerate(S):
                T = S[:idx] + S[idx + 1:]
                cols = _cols(_koszul_operator(n, m.word, j), m, m, d - 2 * k, 2, p)
                parts.append((pos[T], -1 if idx % 2 else 1, cols))
            for b in range(block[k]):
                acc: dict = {}
                for off, sign, cols in parts:
                    _add_into(acc, _shift_vec(cols[b], off, sign, p), p)
                out.append(acc)
        return out

    ranks = {k: _rank(boundary(k), p) if size[k] and size[k - 1] else 0 for k in range(1, n + 1)}
    return {k: size[k] - ranks.get(k, 0) - ranks.get(k + 1, 0) for k in range(n + 1)
            if size[k] - ranks.get(k, 0) - ranks.get(k + 1, 0)}


def hochschild_homology(m: BSBimodule, cutoff: int, p=None) -> dict:
    """(k, d) -> dim HH_k(M)_d for d <= cutoff, by Koszul homology."""
    lo = min(m.degrees)
    return {(k, d): v for d in range(lo, cutoff + 1) for k, v in hochschild_homology_slice(m, d, p).items()}


def _column_table(table: PoincareTable, a: int, shift: int = 0) -> dict:
    """(t, d + shift) -> dim for column a; keeps only degrees that stay <= cutoff."""
    out = {}
    for (t, d), v in table.column(a).items():
        if d + shift <= table.cutoff:
            out[(t, d + shift)] = v
    return out


def hh0_complex(c: rq.SBComplex, req: SliceRequest = SliceRequest()) -> dict:
    """(t, d) -> dim of H(HH^0(C))."""
    t = hhh(c, replace(req, a_degrees=(0,), normalized=False))
    return _column_table(t, 0)


def hh_top_complex(c: rq.SBComplex, req: SliceRequest = SliceRequest()) -> dict:
    """(t, d) -> dim of H(HH_0(C)) = H(HH^n(C))(-2n): degree d reads HH^n in degree d - 2n."""
    n = c.n
    t = hhh(c, replace(req, a_degrees=(n,), normalized=False))
    return _column_table(t, n, 2 * n)


# ---------------------------------------------------------------------------
# partial traces and plain homology


def _expand_e1(table: dict, cutoff: int) -> dict:
    """Tensor a (t, d) table with Q[e_1] (degrees 0, 2, 4, ...), truncated at cutoff."""
    out: dict = {}
    for (t, d), v in table.items():
        dd = d
        while dd <= cutoff:
            out[(t, dd)] = out.get((t, dd), 0) + v
            dd += 2
    return out


def ptr_slice(c: rq.SBComplex, sign: int, d: int, p=None, reduced: bool = True) -> dict:
    """t -> dim of H(pi^sign(C)) in degree d; pi^- = kernel, pi^+ = cokernel of x_n - X'_n."""
    ts = c.degrees()
    sl = _Slicer(c, p, reduced)
    n = c.n

    def phi(t, deg, row_offset=0):
        offs, _ = sl.offsets(t, deg + 2)
        out = []
        for i, m in enumerate(c.summands(t)):
            cols = _cols(sl.operator(m, n), m, m, deg, 2, p)
            out.extend(_shift_vec(v, offs[i] + row_offset) for v in cols)
        return out

    rk: dict = {}

    def prank(t, deg):
        key = (t, deg)
        if key not in rk:
            rk[key] = _rank(phi(t, deg), p) if t in c.terms else 0
        return rk[key]

    dims = {t: sl.dim(t, d) for t in ts}
    if sign < 0:
        def combined(t):
            return _rank(_stack(phi(t, d), sl.dim(t, d + 2), sl.chain(t, d)), p)

        return iterated_homology(dims, lambda t: prank(t, d), lambda t: 0, combined)

    def combined(t):
        return _rank(sl.chain(t, d) + phi(t + 1, d - 2), p)

    return iterated_homology(dims, lambda t: 0, lambda t: prank(t, d - 2), combined)


def ptr_complex(c: rq.SBComplex, sign: int, req: SliceRequest = SliceRequest()) -> dict:
    """(t, d) -> dim of the homology of pi^sign applied termwise."""
    c.check_d2()
    degrees = list(range(_min_degree(c) - 2, req.cutoff + 1))
    results = _map_degrees(lambda d: ptr_slice(c, sign, d, req.p, req.reduced), degrees, req.workers)
    out = {(t, d): v for d, res in zip(degrees, results) for t, v in res.items() if v}
    return _expand_e1(out, req.cutoff) if req.reduced else out


def underlying_homology(c: rq.SBComplex, req: SliceRequest = SliceRequest()) -> dict:
    """(t, d) -> homology of the complex of graded vector spaces (no Hochschild functor)."""
    c.check_d2()
    sl = _Slicer(c, req.p, req.reduced)
    out = {}
    for d in range(_min_degree(c), req.cutoff + 1):
        dims = {t: sl.dim(t, d) for t in c.degrees()}
        h = iterated_homology(dims, lambda t: 0, lambda t: 0, lambda t: _rank(sl.chain(t, d), req.p))
        out.update({(t, d): v for t, v in h.items() if v})
    return _expand_e1(out, req.cutoff) if req.reduced else out

# ---------------------------------------------------------------------------
# Hom complexes


def _F(b: hk.BraidWord) -> rq.SBComplex:
    """Simplified complex of a braid, through the on-disk cache when one is configured."""
    return rq.cached_braid_complex(b)


def _as_braid(x, n: int | None = None) -> hk.BraidWord:
    if isinstance(x, hk.BraidWord):
        return x
    if isinstance(x, hk.Perm):
        return hk.BraidWord.positive_lift(x)
    raise TypeError(f"expected a BraidWord or Perm, got {type(x).__name__}")


def hom_homology(a, b, req: SliceRequest = SliceRequest()) -> dict:
    """(t, d) -> dim H(Hom(F(a), F(b))), as HH^0 of F(b) (x) F(a^{-1})."""
    a, b = _as_braid(a), _as_braid(b)
    if a.n != b.n:
        raise StrandMismatch("Hom between braids on different strand counts")
    return hh0_complex(_F(b * a.inverse()), req)


# ---------------------------------------------------------------------------
# free ranks


def free_rank_extract(table: Mapping[int, int], n: int, cutoff: int) -> dict:
    """Divide a graded dimension function by the Hilbert series of R (n variables).

    ``table`` maps degree -> dim, exact for degrees <= cutoff.  Returns
    degree -> free rank for degrees <= cutoff.
    """
    if not table:
        return {}
    lo = min(table)
    # multiply by (1 - t^2)^n
    coeffs = {2 * k: (-1) ** k * _binom(n, k) for k in range(n + 1)}
    out = {}
    for d in range(lo, cutoff + 1):
        s = sum(c * table.get(d - e, 0) for e, c in coeffs.items())
        if s < 0:
            raise NotFreeBelowCutoff(f"negative coefficient {s} in degree {d}")
        if s:
            out[d] = s
    return out


def _binom(n, k):
    from math import comb
    return comb(n, k)


def free_ranks_by_t(table: Mapping, n: int, cutoff: int) -> dict:
    """(t, d) -> dim  to  t -> {degree: rank}."""
    by_t: dict = {}
    for (t, d), v in table.items():
        by_t.setdefault(t, {})[d] = v
    return {t: r for t, col in sorted(by_t.items()) if (r := free_rank_extract(col, n, cutoff))}


def hilbert_table(n: int, cutoff: int, shift: int = 0, t: int = 0) -> dict:
    """(t, d) -> dim R(shift)_d for d <= cutoff."""
    return {(t, d): bm.hilbert_R(n, d + shift) for d in range(-shift, cutoff + 1) if bm.hilbert_R(n, d + shift)}


# ---------------------------------------------------------------------------
# Euler characteristic


def euler_series(table: PoincareTable) -> dict:
    """{a: {m: coeff of v^{-m}}} of sum (-1)^t a^k v^{-(d + 2k)} T(k, t, d)."""
    out: dict = {}
    for (a, t, d), v in table.entries.items():
        m = d + 2 * a if not table.normalized else d
        col = out.setdefault(a, {})
        col[m] = col.get(m, 0) + (-1) ** (t % 2) * v
    return {a: {m: c for m, c in col.items() if c} for a, col in out.items()}


def trace_series(b: hk.BraidWord, max_power: int) -> dict:
    tr = hk.jones_ocneanu_trace(hk.braid_to_hecke(b))
    return {a: c.series_in_vinv(max_power) for a, c in tr.items()}


def check_euler(b: hk.BraidWord, table: PoincareTable) -> dict:
    """Compare the alternating sum of the table with the trace, below cutoff."""
    es = euler_series(table)
    ts = trace_series(b, table.cutoff + 2 * table.n)
    cells = []
    for a in range(table.n + 1):
        limit = table.cutoff + 2 * a
        got = es.get(a, {})
        want = ts.get(a, {})
        for m in sorted(set(got) | set(want)):
            if m > limit:
                continue
            g, w = got.get(m, 0), want.get(m, 0)
            cells.append({"a": a, "m": m, "table": int(g), "trace": str(w), "pass": g == w})
    return _report("euler", cells, {"braid": str(b), "n": b.n})


# ---------------------------------------------------------------------------
# comparison reports


def _report(name: str, cells: list, extra: dict | None = None, tables: dict | None = None) -> dict:
    rep = {"check": name, "pass": all(c["pass"] for c in cells), "comparisons": cells}
    if extra:
        rep.update(extra)
    if tables is not None:
        rep["tables"] = tables
    return rep


def compare_tables(left: Mapping, right: Mapping, cutoff: int) -> list:
    """Entrywise comparison of (t, d) tables for d <= cutoff."""
    cells = []
    for key in sorted(set(left) | set(right)):
        if key[-1] > cutoff:
            continue
        l, r = left.get(key, 0), right.get(key, 0)
        cells.append({"cell": ":".join(map(str, key)), "left": l, "right": r, "pass": l == r})
    return cells


def _tjson(table: Mapping) -> dict:
    return {":".join(map(str, k)): v for k, v in sorted(table.items())}


def check_serre(b: hk.BraidWord, req: SliceRequest = SliceRequest()) -> dict:
    """HH^0(F(b)) against HH_0(F(ft) (x) F(b))."""
    left = hh0_complex(_F(b), req)
    right = hh_top_complex(_F(rq.ft(b.n) * b), req)
    cells = compare_tables(left, right, req.cutoff)
    return _report("serre", cells, {"braid": str(b), "n": b.n},
                   {"hh0": _tjson(left), "hh_top_ft": _tjson(right)})


def check_kalman_cat(b: hk.BraidWord, req: SliceRequest = SliceRequest()) -> dict:
    """HHH^0(b) against HHH^n(b ft)(-2n)."""
    n = b.n
    left = hhh(_F(b), replace(req, a_degrees=(0,), normalized=False))
    right = hhh(_F(b * rq.ft(n)), replace(req, a_degrees=(n,), normalized=False))
    lt = _column_table(left, 0)
    rt = _column_table(right, n, 2 * n)
    cells = compare_tables(lt, rt, req.cutoff)
    return _report("kalman-cat", cells, {"braid": str(b), "n": n},
                   {"hhh0": _tjson(lt), "hhhn_ft": _tjson(rt)})


def check_relative_serre(c: rq.SBComplex, req: SliceRequest = SliceRequest(), label: str = "") -> dict:
    """pi^-(X) against pi^+(L_n X) and pi^+(X L_n)."""
    n = c.n
    L = _F(rq.jm(n))
    left = ptr_complex(c, -1, req)
    lx = ptr_complex(rq.gaussian_eliminate(rq.tensor_complex(L, c)), +1, req)
    xl = ptr_complex(rq.gaussian_eliminate(rq.tensor_complex(c, L)), +1, req)
    cells = [dict(cell, side="L X") for cell in compare_tables(left, lx, req.cutoff)]
    cells += [dict(cell, side="X L") for cell in compare_tables(left, xl, req.cutoff)]
    return _report("relative-serre", cells, {"complex": label or str(c), "n": n},
                   {"ptr_minus": _tjson(left), "ptr_plus_LX": _tjson(lx), "ptr_plus_XL": _tjson(xl)})


def check_hh_duality(m: BSBimodule, req: SliceRequest = SliceRequest()) -> dict:
    """Free ranks of HH~^k(M) against the degree-negated free ranks of HH~^{n-k}(M^dual)."""
    n = m.n
    tm = hh_bimodule(m, replace(req, a_degrees=None, normalized=False))
    td = hh_bimodule(bm.dual(m), replace(req, a_degrees=None, normalized=False))
    cells = []
    ranks = {}
    for k in range(n + 1):
        # HH~^k degree e reads HH^k degree e - 2k; exact while e - 2k <= cutoff
        cut = req.cutoff
        a = free_rank_extract({d + 2 * k: v for (t, d), v in tm.column(k).items()}, n, cut + 2 * k)
        b = free_rank_extract({d + 2 * (n - k): v for (t, d), v in td.column(n - k).items()}, n,
                              cut + 2 * (n - k))
        bneg = {-e: v for e, v in b.items()}
        ranks[k] = {"M": a, "dual": b}
        # ranks are finite polynomials; compare wherever both sides are exact
        window = min(cut + 2 * k, cut + 2 * (n - k))
        for e in sorted(set(a) | set(bneg)):
            if abs(e) > window:
                continue
            l, r = a.get(e, 0), bneg.get(e, 0)
            cells.append({"cell": f"{k}:{e}", "left": l, "right": r, "pass": l == r})
    return _report("duality", cells, {"bimodule": str(m), "n": n},
                   {str(k): {"M": {str(e): v for e, v in r["M"].items()},
                             "dual": {str(e): v for e, v in r["dual"].items()}} for k, r in ranks.items()})


def _free_ranks_normalized(m: BSBimodule, k: int, req: SliceRequest) -> dict:
    """Free ranks of HH~^k(M) = HH^k(M)(-2k), exact in degrees <= cutoff."""
    t = hh_bimodule(m, replace(req, a_degrees=(k,), normalized=False))
    return free_rank_extract({d + 2 * k: v for (_, d), v in t.column(k).items()}, m.n, req.cutoff + 2 * k)


def check_complex_duality(b: hk.BraidWord, req: SliceRequest = SliceRequest()) -> dict:
    """Termwise shadow of F(b)^dual = F(b^{-1}) on Hochschild tables.

    For each chain group C^t of F(b) and each k, the free ranks of HH~^k(C^t)
    must equal the degree-negated free ranks of HH~^{n-k}(C'^{-t}), C' = F(b^{-1}).
    Homology itself is not free, so the comparison is made before taking it.
    """
    n = b.n
    c, cd = _F(b), _F(b.inverse())
    window = req.cutoff
    cells, tables = [], {}
    for t in sorted(set(c.degrees()) | {-s for s in cd.degrees()}):
        for k in range(n + 1):
            lhs: dict = {}
            for m in c.summands(t):
                for e, v in _free_ranks_normalized(m, k, req).items():
                    lhs[e] = lhs.get(e, 0) + v
            rhs: dict = {}
            for m in cd.summands(-t):
                for e, v in _free_ranks_normalized(m, n - k, req).items():
                    rhs[-e] = rhs.get(-e, 0) + v
            tables[f"{k}:{t}"] = {"F": {str(e): v for e, v in sorted(lhs.items())},
                                  "F_inv_dual": {str(e): v for e, v in sorted(rhs.items())}}
            for e in sorted(set(lhs) | set(rhs)):
                if abs(e) > window:
                    continue
                l, r = lhs.get(e, 0), rhs.get(e, 0)
                cells.append({"cell": f"{k}:{t}:{e}", "left": l, "right": r, "pass": l == r})
    return _report("complex-duality", cells, {"braid": str(b), "n": n}, tables)


def check_markov(b: hk.BraidWord, req: SliceRequest = SliceRequest()) -> dict:
    """Stabilisation identities between hhh(F(b)) on n strands and hhh(F(b s_n^{+-1})) on n+1.

    positive: T_{n+1}(k, t, d) = T_n(k, t - 1, d + 1)       HH^k(X F Y) = HH^k(X Y)[-1](1)
    negative: T_{n+1}(k, t, d) = T_n(k - 1, t, d - 1)       HH^k(X F^-1 Y) = HH^{k-1}(X Y)(-1)

    The negative move as displayed disagrees with the single-bimodule Markov moves,
    which give HH^{k-1}(X Y)(3) instead (the categorical partner of pi(H^-1) = a v).
    That version is reported under "derived" and does not gate ``pass``.
    """
    n = b.n
    base = hhh(_F(b), req)
    big = {}
    for sgn, name in ((1, "positive"), (-1, "negative")):
        big[name] = hhh(_F(hk.BraidWord(n + 1, b.letters + (sgn * n,))), req)
    # (k, t, d) offsets applied to the base table
    moves = {"positive": (0, 1, -1), "negative": (1, 0, 1), "negative(3)": (1, 0, -3)}

    def cells_for(name, target):
        dk, dt, dd = moves[name]
        pred = {(k + dk, t + dt, d + dd): v for (k, t, d), v in base.entries.items()}
        # exact while both d and d - dd stay below the cutoff
        limit = req.cutoff + min(dd, 0)
        out = []
        for key in sorted(set(pred) | set(target.entries)):
            if key[2] > limit:
                continue
            l, r = target.entries.get(key, 0), pred.get(key, 0)
            out.append({"cell": f"{name}:" + ":".join(map(str, key)), "left": l, "right": r, "pass": l == r})
        return out

    cells = cells_for("positive", big["positive"]) + cells_for("negative", big["negative"])
    derived = cells_for("negative(3)", big["negative"])
    tables = {"base": base.to_json(), "positive": big["positive"].to_json(), "negative": big["negative"].to_json()}
    return _report("markov", cells, {"braid": str(b), "n": n,
                                     "derived": {"pass": all(c["pass"] for c in derived), "comparisons": derived}},
                   tables)


def check_kalman_decat(n: int, samples: int = 20, seed: int = 0) -> dict:
    import random
    rng = random.Random(seed)
    FT = hk.full_twist(n)
    cells = []
    xs = [(f"H_{''.join(map(str, w.images))}", hk.HeckeElt.basis(w)) for w in hk.symmetric_group(n)]
    xs += [(f"random_{k}", hk.random_element(n, rng)) for k in range(samples)]
    for name, x in xs:
        top = hk.trace_top(x * FT)
        bottom = hk.trace_bottom(x)
        cells.append({"cell": name, "left": str(top), "right": str(bottom), "pass": top == bottom})
    return _report("kalman-decat", cells, {"n": n})


def check_lw(n: int, req: SliceRequest = SliceRequest()) -> dict:
    """Hom(F_v, F^{-1}_{w^{-1}}) is R (concentrated in t = 0, degree 0) when v = w and 0 otherwise."""
    R = hilbert_table(n, req.cutoff)
    cells = []
    for w in hk.symmetric_group(n):
        neg = hk.BraidWord.negative_lift(w)
        for v in hk.symmetric_group(n):
            h = hom_homology(hk.BraidWord.positive_lift(v), neg, req)
            want = R if v == w else {}
            ok = h == want
            cells.append({"cell": f"{v!r}->{w!r}", "left": _tjson(h), "right": _tjson(want), "pass": ok})
    return _report("lw", cells, {"n": n})


def check_bruhat(n: int, req: SliceRequest = SliceRequest()) -> dict:
    """Hom(F_w, F_v) vanishes exactly when w is not below v."""
    cells = []
    for w in hk.symmetric_group(n):
        for v in hk.symmetric_group(n):
            h = hom_homology(w, v, req)
            vanish = not any(h.values())
            expect = not w.bruhat_le(v)
            cells.append({"cell": f"{w!r}->{v!r}", "left": vanish, "right": expect,
                          "pass": vanish == expect})
    return _report("bruhat", cells, {"n": n})


def cone_psi_check(i: int, n: int, req: SliceRequest = SliceRequest()) -> dict:
    """Slice homology of Cone(psi_i) against the two-term complex R(-1) -> R(1) (multiplication by x_i - x_{i+1})."""
    f = rq.psi_generator(i, n)
    f.check()
    c = rq.gaussian_eliminate(rq.cone(f))
    ref = rq.SBComplex(n, {-1: (bm.R_module(n, -1),), 0: (bm.R_module(n, 1),)},
                       {-1: {(0, 0): PolyMatrix.from_dense(n, [[bm.x(n, i) - bm.x(n, i + 1)]])}})
    full = replace(req, a_degrees=None, normalized=False)
    cells = [dict(cell, what="hhh") for cell in compare_tables(
        {k: v for k, v in hhh(c, full).entries.items()},
        {k: v for k, v in hhh(ref, full).entries.items()}, req.cutoff)]
    # the underlying chain complexes of graded vector spaces
    cells += [dict(cell, what="complex") for cell in compare_tables(
        underlying_homology(c, req), underlying_homology(ref, req), req.cutoff)]
    return _report("cone-psi", cells, {"i": i, "n": n, "cone": str(c)})


# ---------------------------------------------------------------------------
# JSON


def report_document(body: dict, cutoff: int | None, field_mode: str = "q") -> dict:
    doc = {"schema": SCHEMA, "conventions": dict(CONVENTIONS, field=field_mode), "cutoff": cutoff,
           "tables": body.get("tables", {}), "comparisons": body.get("comparisons", []),
           "pass": bool(body.get("pass", True))}
    for k, v in body.items():
        if k not in doc and k not in ("tables", "comparisons", "pass"):
            doc[k] = v
    return doc


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=1, default=str)
