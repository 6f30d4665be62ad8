"""
Exact sparse linear algebra over Q (or a prime field) and homology of
finite graded chain complexes.

Scalars over Q are ``gmpy2.mpq``; over F_p they are Python ints in [0, p).
A field is selected by passing ``p=None`` (rationals) or a prime ``p``.

All elimination goes through :func:`_eliminate`, a Gauss(-Jordan) sweep with
Markowitz-style pivot selection: the next pivot row is the shortest active
row, and within it the pivot column is the one with the fewest occurrences.
This keeps fill-in low on the very sparse, very tall slice matrices that
tensor-product complexes produce.
"""
from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import ChainConditionViolated, ShapeMismatch

#: Default prime for the finite-field fast path (2**62 - 57).
DEFAULT_PRIME = 4611686018427387847

_ZERO = mpq(0)
_ONE = mpq(1)


def to_scalar(x, p: int | None = None):
    """Coerce ``x`` (int, Fraction, mpq, ...) into the active field."""
    if p is None:
        return mpq(x)
    x = mpq(x)
    num, den = int(x.numerator), int(x.denominator)
    if den % p == 0:
        raise ZeroDivisionError(f"denominator {den} vanishes mod {p}")
    return num * pow(den, -1, p) % p


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Immutable sparse matrix; rows are stored as ``{col: value}`` dicts with no zeros."""

    nrows: int
    ncols: int
    rows: tuple = field(repr=False)
    p: int | None = None

    def __post_init__(self):
        if self.nrows < 0 or self.ncols < 0:
            raise ShapeMismatch("negative dimension")
        if len(self.rows) != self.nrows:
            raise ShapeMismatch("row storage does not match nrows")

    # -- construction -------------------------------------------------
    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Mapping | Iterable, p: int | None = None):
        rows = [dict() for _ in range(nrows)]
        items = entries.items() if isinstance(entries, Mapping) else entries
        for (r, c), v in items:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise ShapeMismatch(f"entry ({r},{c}) outside {nrows}x{ncols}")
            v = to_scalar(v, p)
            row = rows[r]
            s = row.get(c, 0) + v
            if p is not None:
                s %= p
            if s:
                row[c] = s
            else:
                row.pop(c, None)
        return cls(nrows, ncols, tuple(rows), p)

    @classmethod
    def from_rows(cls, nrows: int, ncols: int, rows: Sequence[dict], p: int | None = None):
        """Wrap already-clean row dicts (no zeros, converted scalars). No copy is made."""
        return cls(nrows, ncols, tuple(rows), p)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], p: int | None = None):
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        entries = {(i, j): v for i, row in enumerate(data) for j, v in enumerate(row) if v}
        return cls.from_entries(nrows, ncols, entries, p)

    @classmethod
    def zero(cls, nrows: int, ncols: int, p: int | None = None):
        return cls(nrows, ncols, tuple({} for _ in range(nrows)), p)

    @classmethod
    def identity(cls, n: int, p: int | None = None):
        one = to_scalar(1, p)
        return cls(n, n, tuple({i: one} for i in range(n)), p)

    # -- views --------------------------------------------------------
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def entries(self) -> dict:
        return {(i, j): v for i, r in enumerate(self.rows) for j, v in r.items()}

    def to_dense(self):
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                out[i][j] = v
        return out

    def columns(self) -> list[dict]:
        cols = [dict() for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                cols[j][i] = v
        return cols

    @property
    def T(self) -> "SparseMatrix":
        return SparseMatrix(self.ncols, self.nrows, tuple(self.columns()), self.p)

    def is_zero(self) -> bool:
        return not any(self.rows)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, tuple(tuple(sorted(r.items())) for r in self.rows)))

    # -- arithmetic ---------------------------------------------------
    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        p = self.p
        orows = other.rows
        out = []
        for r in self.rows:
            acc: dict = {}
            for k, a in r.items():
                for j, b in orows[k].items():
                    acc[j] = acc.get(j, 0) + a * b
            if p is None:
                out.append({j: v for j, v in acc.items() if v})
            else:
                out.append({j: v % p for j, v in acc.items() if v % p})
        return SparseMatrix(self.nrows, other.ncols, tuple(out), p)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise ShapeMismatch(f"cannot add {self.shape} and {other.shape}")
        return SparseMatrix(self.nrows, self.ncols,
                            tuple(_axpy(a, b, 1, self.p) for a, b in zip(self.rows, other.rows)), self.p)

    def __neg__(self):
        p = self.p
        if p is None:
            return SparseMatrix(self.nrows, self.ncols, tuple({j: -v for j, v in r.items()} for r in self.rows))
        return SparseMatrix(self.nrows, self.ncols,
                            tuple({j: (-v) % p for j, v in r.items()} for r in self.rows), p)

    def __sub__(self, other):
        return self + (-other)

    def reduce_mod(self, p: int) -> "SparseMatrix":
        """Image of a rational matrix in F_p."""
        rows = []
        for r in self.rows:
            new = {}
            for j, v in r.items():
                w = to_scalar(v, p)
                if w:
                    new[j] = w
            rows.append(new)
        return SparseMatrix(self.nrows, self.ncols, tuple(rows), p)


def hstack(blocks: Sequence[SparseMatrix]) -> SparseMatrix:
    if not blocks:
        raise ShapeMismatch("hstack of nothing")
    nrows = blocks[0].nrows
    rows = [dict() for _ in range(nrows)]
    off = 0
    for b in blocks:
        if b.nrows != nrows:
            raise ShapeMismatch("hstack row mismatch")
        for i, r in enumerate(b.rows):
            for j, v in r.items():
                rows[i][off + j] = v
        off += b.ncols
    return SparseMatrix(nrows, off, tuple(rows), blocks[0].p)


def vstack(blocks: Sequence[SparseMatrix]) -> SparseMatrix:
    if not blocks:
        raise ShapeMismatch("vstack of nothing")
    ncols = blocks[0].ncols
    rows: list = []
    for b in blocks:
        if b.ncols != ncols:
            raise ShapeMismatch("vstack column mismatch")
        rows.extend(b.rows)
    return SparseMatrix(len(rows), ncols, tuple(rows), blocks[0].p)


def _axpy(a: dict, b: dict, c, p):
    """Return a + c*b as a new clean dict."""
    out = dict(a)
    for j, v in b.items():
        s = out.get(j, 0) + c * v
        if p is not None:
            s %= p
        if s:
            out[j] = s
        else:
            out.pop(j, None)
    return out


def _eliminate(vectors: Iterable[dict], p: int | None, jordan: bool = False):
    """Sparse Gaussian elimination on row vectors.

    Returns ``(pivots, order)`` where ``pivots`` maps pivot column -> the
    normalised pivot row (pivot entry 1).  With ``jordan=True`` every pivot
    column is cleared from every other pivot row, so pivot rows only carry
    entries in non-pivot columns besides their own pivot.
    """
    rows: dict[int, dict] = {}
    cols: dict = defaultdict(set)
    for i, v in enumerate(vectors):
        if v:
            rows[i] = dict(v)
            for c in v:
                cols[c].add(i)
    heap = [(len(r), i) for i, r in rows.items()]
    heapq.heapify(heap)
    pivots: dict = {}
    done: dict[int, int] = {}  # pivot row id -> pivot col (jordan mode keeps them in `rows`)
    order = []
    while heap:
        ln, i = heapq.heappop(heap)
        r = rows.get(i)
        if r is None or i in done or len(r) != ln:
            continue
        if not r:
            del rows[i]
            continue
        c = min(r, key=lambda k: (len(cols[k]), k))
        a = r[c]
        if p is None:
            inv = 1 / a
            if a != 1:
                r = {k: v * inv for k, v in r.items()}
        else:
            inv = pow(a, -1, p)
            if a != 1:
                r = {k: v * inv % p for k, v in r.items()}
        rows[i] = r
        for j in list(cols[c]):
            if j == i or (j in done and not jordan):
                continue
            rj = rows[j]
            f = rj[c]
            for k, v in r.items():
                s = rj.get(k, 0) - f * v
                if p is not None:
                    s %= p
                if s:
                    if k not in rj:
                        cols[k].add(j)
                    rj[k] = s
                else:
                    if k in rj:
                        del rj[k]
                        cols[k].discard(j)
            if j not in done:
                heapq.heappush(heap, (len(rj), j))
        done[i] = c
        order.append(c)
        if not jordan:
            for k in r:
                cols[k].discard(i)
            del rows[i]
        pivots[c] = r
    if jordan:
        for i, c in done.items():
            pivots[c] = rows[i]
    return pivots, order


def rank_of_vectors(vectors: Iterable[dict], p: int | None = None) -> int:
    """Dimension of the span of sparse vectors (dicts index -> scalar)."""
    pivots, _ = _eliminate(vectors, p)
    return len(pivots)


def rank(m: SparseMatrix, p: int | None = None) -> int:
    """Rank of ``m`` over Q (``p=None``) or F_p.

    A rational matrix is reduced mod ``p`` when a prime is requested.
    """
    if p is not None and m.p != p:
        m = m.reduce_mod(p)
    elif p is None and m.p is not None:
        raise ValueError("cannot lift a prime-field matrix to Q")
    if m.nrows <= m.ncols:
        return rank_of_vectors(m.rows, p)
    return rank_of_vectors(m.columns(), p)


def kernel_vectors(m: SparseMatrix, p: int | None = None) -> list[dict]:
    """Basis of ker m as sparse column vectors (dicts over column indices of m)."""
    if p is not None and m.p != p:
        m = m.reduce_mod(p)
    pivots, _ = _eliminate(m.rows, p, jordan=True)
    free = [j for j in range(m.ncols) if j not in pivots]
    # column -> list of (pivot column, coefficient) for pivot rows touching it
    touching: dict = defaultdict(list)
    for c, r in pivots.items():
        for k, v in r.items():
            if k != c:
                touching[k].append((c, v))
    one = to_scalar(1, p)
    basis = []
    for f in free:
        vec = {f: one}
        for c, v in touching.get(f, ()):
            vec[c] = -v if p is None else (-v) % p
        basis.append(vec)
    return basis


def kernel_basis(m: SparseMatrix, p: int | None = None) -> SparseMatrix:
    """Matrix whose columns form a basis of ker m."""
    vecs = kernel_vectors(m, p)
    rows = [dict() for _ in range(m.ncols)]
    for j, vec in enumerate(vecs):
        for i, v in vec.items():
            rows[i][j] = v
    return SparseMatrix(m.ncols, len(vecs), tuple(rows), p if p is not None else m.p)


@dataclass(frozen=True)
class FiniteComplex:
    """Finite cochain complex of vector spaces: ``diffs[k]`` is d_k: C^k -> C^{k+1}."""

    dims: Mapping[int, int]
    diffs: Mapping[int, SparseMatrix]

    def __post_init__(self):
        for k, d in self.diffs.items():
            if d.shape != (self.dim(k + 1), self.dim(k)):
                raise ShapeMismatch(f"d_{k} has shape {d.shape}, expected {(self.dim(k + 1), self.dim(k))}")

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    def degrees(self) -> list[int]:
        return sorted(k for k, v in self.dims.items() if v)

    def check_chain_condition(self):
        for k, d in self.diffs.items():
            nxt = self.diffs.get(k + 1)
            if nxt is not None and not (nxt @ d).is_zero():
                raise ChainConditionViolated(f"d_{k + 1} d_{k} != 0")


def homology_dims(c: FiniteComplex, p: int | None = None) -> dict[int, int]:
    """dim H^k = dim C^k - rank d_k - rank d_{k-1}, for every k with C^k != 0."""
    c.check_chain_condition()
    ranks = {k: rank(d, p) for k, d in c.diffs.items()}
    return {k: c.dim(k) - ranks.get(k, 0) - ranks.get(k - 1, 0) for k in c.degrees()}


def euler_characteristic(dims: Mapping[int, int]) -> int:
    return sum((-1) ** (k % 2) * v for k, v in dims.items())


def rank_mismatch(m: SparseMatrix, p: int = DEFAULT_PRIME) -> bool:
    """True when the rank over Q and over F_p disagree (a bad-prime event)."""
    return rank(m) != rank(m, p)
