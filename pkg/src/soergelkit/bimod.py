"""
Bott-Samelson bimodules over R = Q[x_1..x_n] as free left R-modules with
explicit right-action matrices.

Grading: deg x_j = 2 and M(k)_d = M_{d+k}, so the generator of R(1) sits in
degree -1.  A word (i_1..i_k) with shift s has basis indexed by bit tuples
(c_1..c_k), left letter slowest, and basis degree sum(2c - 1) - s.  For a
single letter the basis is e0 = 1(x)1, e1 = 1(x)x_{i+1}.

Matrices act on columns: column b of X'_j lists the coefficients of e_b * x_j,
and a map f has f(e_b) = sum_a M[a, b] e_a.  Entry (a, b) of a degree-d map
is homogeneous of degree d + deg(src_b) - deg(tgt_a).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from flint import fmpq, fmpq_mpoly, fmpq_mpoly_ctx
from gmpy2 import mpq

from .errors import IndexOutOfRange, ShapeMismatch, StrandMismatch
from .exactla import SparseMatrix, rank, to_scalar

# ---------------------------------------------------------------------------
# the polynomial ring


@lru_cache(maxsize=None)
def ring(n: int) -> fmpq_mpoly_ctx:
    """Context for Q[x_1..x_n] (at least one variable so that n=0 still works)."""
    return fmpq_mpoly_ctx.get(tuple(f"x{j}" for j in range(1, max(n, 1) + 1)), "degrevlex")


def x(n: int, j: int) -> fmpq_mpoly:
    return ring(n).gens()[j - 1]


def const(n: int, c) -> fmpq_mpoly:
    if not c:
        return ring(n).from_dict({})
    if not isinstance(c, (int, fmpq)):
        c = fmpq(int(c.numerator), int(c.denominator))
    return ring(n).from_dict({(0,) * max(n, 1): c})


@lru_cache(maxsize=None)
def _center_substitution(n: int) -> tuple:
    m = n - 1
    if m == 0:
        return (const(0, 0),)
    ys = ring(m).gens()
    tot = ys[0]
    for y in ys[1:]:
        tot = tot + y
    return tuple(ys) + (-tot,)


def reduce_center(f: fmpq_mpoly, n: int) -> fmpq_mpoly:
    """Image of f in R/(x_1 + ... + x_n) = Q[x_1..x_{n-1}] (x_n -> -(x_1 + ... + x_{n-1}))."""
    return f.compose(*_center_substitution(n), ctx=ring(n - 1))


def poly_degree(f: fmpq_mpoly) -> int | None:
    """Internal degree of a homogeneous polynomial (None for zero); raises if inhomogeneous."""
    if f == 0:
        return None
    degs = {sum(m) for m in f.monoms()}
    if len(degs) != 1:
        raise ValueError(f"{f} is not homogeneous")
    return 2 * degs.pop()


def _terms(f: fmpq_mpoly) -> tuple:
    return tuple((m, mpq(int(c.p), int(c.q))) for m, c in zip(f.monoms(), f.coeffs()))


@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple:
    """Exponent vectors of internal degree d (deg x = 2), in a fixed order."""
    if d < 0 or d % 2:
        return ()
    if n == 0:
        return ((0,),) if d == 0 else ()
    k = d // 2
    nv = max(n, 1)
    out = []
    for combo in itertools.combinations_with_replacement(range(nv), k):
        e = [0] * nv
        for j in combo:
            e[j] += 1
        out.append(tuple(e))
    return tuple(sorted(out, reverse=True))


@lru_cache(maxsize=None)
def monomial_index(n: int, d: int) -> dict:
    return {m: i for i, m in enumerate(monomials(n, d))}


def hilbert_R(n: int, d: int) -> int:
    return len(monomials(n, d))


# ---------------------------------------------------------------------------
# polynomial matrices


class PolyMatrix:
    """Sparse matrix over R; ``rows[i]`` maps column -> nonzero polynomial."""

    __slots__ = ("n", "nrows", "ncols", "rows", "__dict__")

    def __init__(self, n: int, nrows: int, ncols: int, rows=None):
        self.n, self.nrows, self.ncols = n, nrows, ncols
        self.rows = rows if rows is not None else [dict() for _ in range(nrows)]

    @classmethod
    def identity(cls, n: int, k: int) -> "PolyMatrix":
        one = const(n, 1)
        return cls(n, k, k, [{i: one} for i in range(k)])

    @classmethod
    def scalar(cls, n: int, k: int, f: fmpq_mpoly) -> "PolyMatrix":
        if f == 0:
            return cls(n, k, k)
        return cls(n, k, k, [{i: f} for i in range(k)])

    @classmethod
    def from_dense(cls, n: int, data: Sequence[Sequence]) -> "PolyMatrix":
        nr = len(data)
        nc = len(data[0]) if nr else 0
        out = cls(n, nr, nc)
        for i, row in enumerate(data):
            for j, f in enumerate(row):
                if not isinstance(f, fmpq_mpoly):
                    f = const(n, f)
                if f != 0:
                    out.rows[i][j] = f
        return out

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i].get(j, ring(self.n).from_dict({}))

    def entries(self) -> Iterable:
        for i, r in enumerate(self.rows):
            for j, f in r.items():
                yield i, j, f

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def is_zero(self) -> bool:
        return not any(self.rows)

    def to_dense(self):
        return [[self[i, j] for j in range(self.ncols)] for i in range(self.nrows)]

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and self.rows == other.rows

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.nrows:
            raise ShapeMismatch(f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        out = []
        orows = other.rows
        for r in self.rows:
            acc: dict = {}
            for k, a in r.items():
                for j, b in orows[k].items():
                    if j in acc:
                        acc[j] = acc[j] + a * b
                    else:
                        acc[j] = a * b
            out.append({j: f for j, f in acc.items() if f != 0})
        return PolyMatrix(self.n, self.nrows, other.ncols, out)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ShapeMismatch("cannot add matrices of different shapes")
        out = []
        for r, s in zip(self.rows, other.rows):
            acc = dict(r)
            for j, f in s.items():
                g = acc[j] + f if j in acc else f
                if g != 0:
                    acc[j] = g
                else:
                    acc.pop(j, None)
            out.append(acc)
        return PolyMatrix(self.n, self.nrows, self.ncols, out)

    def __neg__(self):
        return PolyMatrix(self.n, self.nrows, self.ncols, [{j: -f for j, f in r.items()} for r in self.rows])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "PolyMatrix":
        if not isinstance(c, fmpq_mpoly):
            c = const(self.n, c)
        if c == 0:
            return PolyMatrix(self.n, self.nrows, self.ncols)
        return PolyMatrix(self.n, self.nrows, self.ncols,
                          [{j: f * c for j, f in r.items()} for r in self.rows])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        cpos = {c: k for k, c in enumerate(cols)}
        out = []
        for i in rows:
            out.append({cpos[j]: f for j, f in self.rows[i].items() if j in cpos})
        return PolyMatrix(self.n, len(rows), len(cols), out)

    def kron_identity(self, k: int) -> "PolyMatrix":
        """self (x) I_k with the left factor slowest."""
        out = []
        for r in self.rows:
            for c in range(k):
                out.append({j * k + c: f for j, f in r.items()})
        return PolyMatrix(self.n, self.nrows * k, self.ncols * k, out)

    @cached_property
    def term_rows(self) -> tuple:
        """Rows as ``{col: ((exponent, mpq), ...)}``; the form used by slicing."""
        return tuple({j: _terms(f) for j, f in r.items()} for r in self.rows)

    def reduce_center(self) -> "PolyMatrix":
        """Entrywise image in R/(e_1), as a matrix over n - 1 variables."""
        out = []
        for r in self.rows:
            row = {}
            for j, f in r.items():
                g = reduce_center(f, self.n)
                if g != 0:
                    row[j] = g
            out.append(row)
        return PolyMatrix(self.n - 1, self.nrows, self.ncols, out)

    def __repr__(self):
        return f"PolyMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def block_matrix(n: int, blocks: dict, row_sizes: Sequence[int], col_sizes: Sequence[int]) -> PolyMatrix:
    """Assemble ``{(I, J): PolyMatrix}`` into one matrix."""
    roff = list(itertools.accumulate([0] + list(row_sizes)))
    coff = list(itertools.accumulate([0] + list(col_sizes)))
    out = PolyMatrix(n, roff[-1], coff[-1])
    for (I, J), B in blocks.items():
        if B.nrows != row_sizes[I] or B.ncols != col_sizes[J]:
            raise ShapeMismatch(f"block ({I},{J}) has shape {B.nrows}x{B.ncols}")
        for i, r in enumerate(B.rows):
            tgt = out.rows[roff[I] + i]
            for j, f in r.items():
                tgt[coff[J] + j] = f
    return out


# ---------------------------------------------------------------------------
# Bott-Samelson bimodules


def _check_word(n: int, word: Iterable[int]):
    for i in word:
        if not 1 <= i <= n - 1:
            raise IndexOutOfRange(f"letter {i} outside 1..{n - 1}")


@lru_cache(maxsize=None)
def _word_degrees(word: tuple) -> tuple:
    return tuple(sum(2 * c - 1 for c in bits) for bits in itertools.product((0, 1), repeat=len(word)))


class _ActionData:
    """Right-action matrices of an unshifted word plus a cache of monomial matrices."""

    def __init__(self, n: int, word: tuple):
        self.n = n
        self.word = word
        self.rank = 2 ** len(word)
        self.X = self._build()
        self._mono: dict = {}

    def _build(self) -> list:
        n = self.n
        if not self.word:
            return [PolyMatrix.scalar(n, 1, x(n, j)) for j in range(1, n + 1)]
        left = action_data(n, self.word[:-1])
        i = self.word[-1]
        k = left.rank
        Xl = left.X
        S = Xl[i - 1] + Xl[i]
        P = Xl[i - 1] @ Xl[i]
        Id = PolyMatrix.identity(n, k)
        zero = PolyMatrix(n, k, k)
        out = []
        for j in range(1, n + 1):
            if j == i + 1:
                blocks = {(0, 0): zero, (0, 1): -P, (1, 0): Id, (1, 1): S}
            elif j == i:
                blocks = {(0, 0): S, (0, 1): P, (1, 0): -Id, (1, 1): zero}
            else:
                blocks = {(c, c): Xl[j - 1] for c in (0, 1)}
            out.append(_interleave(n, blocks, k))
        return out

    def mono(self, e: tuple) -> PolyMatrix:
        """The matrix of right multiplication by x^e."""
        m = self._mono.get(e)
        if m is None:
            if not any(e):
                m = PolyMatrix.identity(self.n, self.rank)
            else:
                j = next(t for t, a in enumerate(e) if a)
                rest = list(e)
                rest[j] -= 1
                m = self.mono(tuple(rest)) @ self.X[j]
            self._mono[e] = m
        return m

    def evaluate(self, f: fmpq_mpoly) -> PolyMatrix:
        """f(X'_1, .., X'_n): right multiplication by f."""
        out = PolyMatrix(self.n, self.rank, self.rank)
        for e, c in zip(f.monoms(), f.coeffs()):
            out = out + self.mono(tuple(e)).scale(c)
        return out


def _interleave(n: int, blocks: dict, k: int) -> PolyMatrix:
    """Build the 2k x 2k matrix with entry [(d,c),(a,b)] = blocks[(c,b)][d,a]."""
    out = PolyMatrix(n, 2 * k, 2 * k)
    for (c, b), B in blocks.items():
        for d, r in enumerate(B.rows):
            tgt = out.rows[2 * d + c]
            for a, f in r.items():
                tgt[2 * a + b] = f
    return out


@lru_cache(maxsize=None)
def action_data(n: int, word: tuple) -> _ActionData:
    return _ActionData(n, word)


@dataclass(frozen=True)
class BSBimodule:
    """B_{i_1} (x) ... (x) B_{i_k} (shift) on n strands."""

    n: int
    word: tuple = ()
    shift: int = 0

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(self.word))
        _check_word(self.n, self.word)

    @property
    def rank(self) -> int:
        return 2 ** len(self.word)

    @property
    def degrees(self) -> tuple:
        return tuple(g - self.shift for g in _word_degrees(self.word))

    @property
    def X(self) -> list:
        """Right-action matrices X'_1..X'_n (independent of the shift)."""
        return action_data(self.n, self.word).X

    def right_mult(self, f: fmpq_mpoly) -> PolyMatrix:
        return action_data(self.n, self.word).evaluate(f)

    def shifted(self, k: int) -> "BSBimodule":
        return BSBimodule(self.n, self.word, self.shift + k)

    def __str__(self):
        body = "".join(f"B{i}" for i in self.word) or "R"
        return body + (f"({self.shift})" if self.shift else "")


def R_module(n: int, shift: int = 0) -> BSBimodule:
    return BSBimodule(n, (), shift)


def elementary(i: int, n: int) -> BSBimodule:
    _check_word(n, (i,))
    return BSBimodule(n, (i,), 0)


def tensor(m: BSBimodule, p: BSBimodule) -> BSBimodule:
    if m.n != p.n:
        raise StrandMismatch(f"tensor of bimodules on {m.n} and {p.n} strands")
    return BSBimodule(m.n, m.word + p.word, m.shift + p.shift)


def dual(m: BSBimodule) -> BSBimodule:
    return BSBimodule(m.n, tuple(reversed(m.word)), -m.shift)


def check_bimodule(m: BSBimodule):
    """Assert commutation, the symmetric relations of every letter and homogeneity."""
    n = m.n
    X = m.X
    for a in range(n):
        for b in range(a + 1, n):
            if X[a] @ X[b] != X[b] @ X[a]:
                raise AssertionError(f"X'_{a + 1} and X'_{b + 1} do not commute on {m}")
    degs = m.degrees
    for j, Xj in enumerate(X, 1):
        for a, b, f in Xj.entries():
            if poly_degree(f) != 2 + degs[b] - degs[a]:
                raise AssertionError(f"X'_{j}[{a},{b}] = {f} has the wrong degree")
    # every letter's symmetric functions pass from the right through to the left
    # when the word is a single letter; for longer words only the outermost
    # letters are constrained, checked on the elementary factors themselves
    if len(m.word) == 1:
        i = m.word[0]
        s = x(n, i) + x(n, i + 1)
        p = x(n, i) * x(n, i + 1)
        if X[i - 1] + X[i] != PolyMatrix.scalar(n, 2, s):
            raise AssertionError("x_i + x_{i+1} is not central")
        if X[i - 1] @ X[i] != PolyMatrix.scalar(n, 2, p):
            raise AssertionError("x_i x_{i+1} is not central")
    for j in range(1, n + 1):
        if not any(j in (i, i + 1) for i in m.word):
            if X[j - 1] != PolyMatrix.scalar(n, m.rank, x(n, j)):
                raise AssertionError(f"x_{j} should act by x_{j}")


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True, eq=False)
class BimMap:
    src: BSBimodule
    tgt: BSBimodule
    degree: int
    matrix: PolyMatrix = field(repr=False)

    def __post_init__(self):
        if (self.matrix.nrows, self.matrix.ncols) != (self.tgt.rank, self.src.rank):
            raise ShapeMismatch(f"matrix {self.matrix.nrows}x{self.matrix.ncols} does not fit {self.src} -> {self.tgt}")

    def check(self):
        """Homogeneity and the intertwining identity M X'_j(src) = X'_j(tgt) M."""
        ds, dt = self.src.degrees, self.tgt.degrees
        for a, b, f in self.matrix.entries():
            if poly_degree(f) != self.degree + ds[b] - dt[a]:
                raise AssertionError(f"entry ({a},{b}) = {f} has degree {poly_degree(f)}, "
                                     f"expected {self.degree + ds[b] - dt[a]}")
        for j in range(self.src.n):
            if self.matrix @ self.src.X[j] != self.tgt.X[j] @ self.matrix:
                raise AssertionError(f"{self} does not commute with x'_{j + 1}")

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def __str__(self):
        return f"BimMap({self.src} -> {self.tgt}, deg {self.degree})"


def identity(m: BSBimodule) -> BimMap:
    return BimMap(m, m, 0, PolyMatrix.identity(m.n, m.rank))


def zero_map(src: BSBimodule, tgt: BSBimodule, degree: int = 0) -> BimMap:
    return BimMap(src, tgt, degree, PolyMatrix(src.n, tgt.rank, src.rank))


def compose(f: BimMap, g: BimMap) -> BimMap:
    """f after g."""
    if g.tgt != f.src:
        raise ShapeMismatch(f"cannot compose {f} after {g}")
    return BimMap(g.src, f.tgt, f.degree + g.degree, f.matrix @ g.matrix)


def add(f: BimMap, g: BimMap) -> BimMap:
    if (f.src, f.tgt, f.degree) != (g.src, g.tgt, g.degree):
        raise ShapeMismatch(f"cannot add {f} and {g}")
    return BimMap(f.src, f.tgt, f.degree, f.matrix + g.matrix)


def scale(f: BimMap, c) -> BimMap:
    return BimMap(f.src, f.tgt, f.degree, f.matrix.scale(c))


def tensor_matrices(F: PolyMatrix, tgtF: BSBimodule, G: PolyMatrix) -> PolyMatrix:
    """Matrix of f (x) g where f has matrix F into tgtF and g has matrix G."""
    n = F.n
    kN, kN2 = G.ncols, G.nrows
    ad = action_data(tgtF.n, tgtF.word)
    out = PolyMatrix(n, F.nrows * kN2, F.ncols * kN)
    cache: dict = {}
    for bp, r in enumerate(G.rows):
        for b, g in r.items():
            key = str(g)
            E = cache.get(key)
            if E is None:
                E = ad.evaluate(g) @ F
                cache[key] = E
            for d, row in enumerate(E.rows):
                tgt = out.rows[d * kN2 + bp]
                for a, h in row.items():
                    tgt[a * kN + b] = h
    return out


def tensor_maps(f: BimMap, g: BimMap) -> BimMap:
    if f.src.n != g.src.n:
        raise StrandMismatch("tensor of maps on different strand counts")
    return BimMap(tensor(f.src, g.src), tensor(f.tgt, g.tgt), f.degree + g.degree,
                  tensor_matrices(f.matrix, f.tgt, g.matrix))


def whisker(left: BSBimodule, f: BimMap, right: BSBimodule) -> BimMap:
    """id_left (x) f (x) id_right."""
    out = f
    if left.word or left.shift:
        out = tensor_maps(identity(left), out)
    if right.word or right.shift:
        out = BimMap(tensor(out.src, right), tensor(out.tgt, right), out.degree,
                     out.matrix.kron_identity(right.rank))
    return out


# ---------------------------------------------------------------------------
# the structural maps of one letter


def counit(i: int, n: int) -> BimMap:
    """b_i: B_i -> R(1), 1(x)1 -> 1, 1(x)x_{i+1} -> x_{i+1}."""
    B = elementary(i, n)
    return BimMap(B, R_module(n, 1), 0, PolyMatrix.from_dense(n, [[1, x(n, i + 1)]]))


def unit(i: int, n: int) -> BimMap:
    """b_i^*: R(-1) -> B_i, 1 -> x_i(x)1 - 1(x)x_{i+1}."""
    B = elementary(i, n)
    return BimMap(R_module(n, -1), B, 0, PolyMatrix.from_dense(n, [[x(n, i)], [-1]]))


def merge(i: int, n: int) -> BimMap:
    """B_i B_i -> B_i(-1): e0(x)e_b -> 0, e1(x)e_b -> -e_b."""
    _check_word(n, (i,))
    return BimMap(BSBimodule(n, (i, i)), BSBimodule(n, (i,), -1), 0,
                  PolyMatrix.from_dense(n, [[0, 0, -1, 0], [0, 0, 0, -1]]))


def split(i: int, n: int) -> BimMap:
    """B_i(1) -> B_i B_i: e_b -> e0(x)e_b."""
    _check_word(n, (i,))
    return BimMap(BSBimodule(n, (i,), 1), BSBimodule(n, (i, i)), 0,
                  PolyMatrix.from_dense(n, [[1, 0], [0, 1], [0, 0], [0, 0]]))


def mult(i: int, n: int) -> BimMap:
    """f(x)g(x)h -> fg(x)h, i.e. B_i B_i -> B_i(1), e_a(x)e_b -> x_{i+1}^a e_b."""
    _check_word(n, (i,))
    xi1 = x(n, i + 1)
    return BimMap(BSBimodule(n, (i, i)), BSBimodule(n, (i,), 1), 0,
                  PolyMatrix.from_dense(n, [[1, 0, xi1, 0], [0, 1, 0, xi1]]))


def split_second(i: int, n: int) -> BimMap:
    """B_i(-1) -> B_i B_i: e_b -> (x_{i+1} e0 - e1)(x)e_b; complements :func:`split`."""
    _check_word(n, (i,))
    xi1 = x(n, i + 1)
    return BimMap(BSBimodule(n, (i,), -1), BSBimodule(n, (i, i)), 0,
                  PolyMatrix.from_dense(n, [[xi1, 0], [0, xi1], [-1, 0], [0, -1]]))


def cap(i: int, n: int) -> BimMap:
    """Pairing B_i B_i -> R: counit after merge."""
    c = counit(i, n)
    m = merge(i, n)
    return BimMap(m.src, R_module(n, 0), 0, c.matrix @ m.matrix)


def cup(i: int, n: int) -> BimMap:
    """Copairing R -> B_i B_i: split after unit, 1 -> x_i e0e0 - e0e1."""
    u = unit(i, n)
    s = split(i, n)
    return BimMap(R_module(n, 0), s.tgt, 0, s.matrix @ u.matrix)


def frobenius_maps(i: int, n: int) -> dict:
    """The four structural maps plus cup/cap and the plain multiplication."""
    return {
        "merge": merge(i, n),
        "counit": counit(i, n),
        "unit": unit(i, n),
        "split": split(i, n),
        "mult": mult(i, n),
        "cup": cup(i, n),
        "cap": cap(i, n),
    }


def splitting_iso(i: int, n: int) -> tuple:
    """B_i B_i = B_i(1) + B_i(-1): returns (projections, inclusions)."""
    return (mult(i, n), merge(i, n)), (split(i, n), split_second(i, n))


# ---------------------------------------------------------------------------
# duality


def coevaluation(m: BSBimodule) -> BimMap:
    """R -> M (x) M^dual, nested cups."""
    n = m.n
    out = identity(R_module(n))
    for i in m.word:
        # insert a cup in the middle of the current word; the last one is innermost
        half = len(out.tgt.word) // 2
        mid = BSBimodule(n, out.tgt.word[:half])
        rest = BSBimodule(n, out.tgt.word[half:])
        c = whisker(mid, cup(i, n), rest)
        out = BimMap(out.src, c.tgt, 0, c.matrix @ out.matrix)
    assert out.tgt.word == m.word + tuple(reversed(m.word))
    return BimMap(R_module(n), BSBimodule(n, out.tgt.word, 0), 0, out.matrix)


def evaluation(m: BSBimodule) -> BimMap:
    """M^dual (x) M -> R, nested caps."""
    n = m.n
    cur_word = tuple(reversed(m.word)) + m.word
    mat = PolyMatrix.identity(n, 2 ** len(cur_word))
    for i in m.word:
        # innermost pair first
        half = len(cur_word) // 2
        left = BSBimodule(n, cur_word[:half - 1])
        right = BSBimodule(n, cur_word[half + 1:])
        assert cur_word[half - 1] == cur_word[half] == i
        c = whisker(left, cap(i, n), right)
        mat = c.matrix @ mat
        cur_word = cur_word[:half - 1] + cur_word[half + 1:]
    return BimMap(BSBimodule(n, tuple(reversed(m.word)) + m.word), R_module(n), 0, mat)


def dual_map(f: BimMap) -> BimMap:
    """f^dual: N^dual -> M^dual via (ev_N (x) id) (id (x) f (x) id) (id (x) coev_M)."""
    n = f.src.n
    M = BSBimodule(n, f.src.word)
    N = BSBimodule(n, f.tgt.word)
    Nd, Md = dual(N), dual(M)
    step1 = whisker(Nd, coevaluation(M), R_module(n))           # Nd -> Nd M Md
    mid = BimMap(M, N, f.degree - f.src.shift + f.tgt.shift, f.matrix)
    step2 = whisker(Nd, mid, Md)                                 # Nd M Md -> Nd N Md
    step3 = whisker(R_module(n), evaluation(N), Md)              # Nd N Md -> Md
    mat = step3.matrix @ step2.matrix @ step1.matrix
    return BimMap(dual(f.tgt), dual(f.src), f.degree, mat)


# ---------------------------------------------------------------------------
# graded slices


@lru_cache(maxsize=None)
def slice_basis(n: int, degrees: tuple, d: int) -> tuple:
    """Basis of M_d for a free module with generator degrees ``degrees``: pairs (b, monomial)."""
    out = []
    for b, g in enumerate(degrees):
        for m in monomials(n, d - g):
            out.append((b, m))
    return tuple(out)


@lru_cache(maxsize=None)
def slice_index(n: int, degrees: tuple, d: int) -> dict:
    return {bm: k for k, bm in enumerate(slice_basis(n, degrees, d))}


def slice_rows(P: PolyMatrix, src_degrees: tuple, tgt_degrees: tuple, d: int, dd: int, p=None) -> list:
    """Column vectors (dicts) of the map M_d -> N_{d+dd} given by left-linear P."""
    n = P.n
    src = slice_basis(n, src_degrees, d)
    tidx = slice_index(n, tgt_degrees, d + dd)
    # invert term_rows to per-source-column lists
    cols: dict = {}
    for a, r in enumerate(P.term_rows):
        for b, terms in r.items():
            cols.setdefault(b, []).append((a, terms))
    out = []
    for b, m in src:
        vec: dict = {}
        for a, terms in cols.get(b, ()):
            for e, c in terms:
                key = (a, tuple(u + v for u, v in zip(m, e)))
                k = tidx.get(key)
                if k is None:
                    continue
                s = vec.get(k, 0) + c
                if s:
                    vec[k] = s
                else:
                    vec.pop(k, None)
        if p is not None:
            vec = {k: to_scalar(v, p) for k, v in vec.items()}
            vec = {k: v for k, v in vec.items() if v}
        out.append(vec)
    return out


def slice_matrix(P: PolyMatrix, src_degrees: tuple, tgt_degrees: tuple, d: int, dd: int, p=None) -> SparseMatrix:
    cols = slice_rows(P, src_degrees, tgt_degrees, d, dd, p)
    nt = len(slice_basis(P.n, tgt_degrees, d + dd))
    rows = [dict() for _ in range(nt)]
    for j, vec in enumerate(cols):
        for i, v in vec.items():
            rows[i][j] = v
    return SparseMatrix(nt, len(cols), tuple(rows), p)


def bar(m: BSBimodule, max_degree: int | None = None, p=None) -> dict:
    """Graded dimensions of M (x)_R Q: per degree, dim M_d / sum_j M_{d-2} x_j."""
    degs = m.degrees
    lo = min(degs)
    if max_degree is None:
        max_degree = max(degs) + 2 * m.n * max(1, len(m.word)) + 2
    out = {}
    for d in range(lo, max_degree + 1):
        dim = len(slice_basis(m.n, degs, d))
        if not dim:
            continue
        vecs = []
        for Xj in m.X:
            vecs.extend(slice_rows(Xj, degs, degs, d - 2, 2, p))
        from .exactla import rank_of_vectors
        r = rank_of_vectors(vecs, p)
        if dim - r:
            out[d] = dim - r
    return out
