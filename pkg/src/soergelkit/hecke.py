"""
Symmetric groups, the type A Hecke algebra in Soergel's normalisation, and
the Jones-Ocneanu trace built from partial traces.

Conventions
-----------
* ``(H_i + v)(H_i - v^{-1}) = 0``, so ``H_i^{-1} = H_i + v - v^{-1}``; ``q = v^{-2}``.
* Permutations are tuples of images of ``1..n``; products compose as functions,
  ``(u w)(j) = u(w(j))``, and ``s_i`` swaps ``i`` and ``i+1``.
* ``H_w = H_{i_1} ... H_{i_k}`` along any reduced word ``w = s_{i_1} ... s_{i_k}``.
* Elements of ``H_n[a]`` are dicts ``{a-degree: HeckeElt}``.

The partial traces are *not* given closed-form constants.  ``pi_plus`` and
``pi_minus`` are computed from their defining rules

    pi^{+-}(x) = x / (1 - q)          for x in H_{n-1}
    pi^+(x H_{n-1} y) = 0
    pi^-(x H_{n-1}^{-1} y) = 0

via the coset normal form ``H_w = H_u H_{n-1} H_y``.  The constants
``pi(x H_{n-1} y)`` and ``pi(x H_{n-1}^{-1} y)`` are reported by
:func:`markov_constants` as consequences.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Mapping

from .errors import IndexOutOfRange, ParseError, StrandMismatch
from .laurent import ONE, Q, V, VINV, ZERO, LaurentRat

# ---------------------------------------------------------------------------
# permutations


@dataclass(frozen=True)
class Perm:
    """A permutation of {1..n}, stored as its tuple of images."""

    images: tuple

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"{self.images} is not a permutation of 1..n")

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_word(cls, n: int, word: Iterable[int]) -> "Perm":
        w = cls.identity(n)
        for i in word:
            w = w.right_mul(i)
        return w

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, j: int) -> int:
        return self.images[j - 1]

    def __mul__(self, other: "Perm") -> "Perm":
        return Perm(tuple(self(other(j)) for j in range(1, other.n + 1)))

    def inverse(self) -> "Perm":
        inv = [0] * self.n
        for j, w in enumerate(self.images, 1):
            inv[w - 1] = j
        return Perm(tuple(inv))

    def right_mul(self, i: int) -> "Perm":
        """w * s_i: swap the entries in positions i, i+1."""
        im = list(self.images)
        im[i - 1], im[i] = im[i], im[i - 1]
        return Perm(tuple(im))

    def left_mul(self, i: int) -> "Perm":
        """s_i * w: swap the values i, i+1."""
        swap = {i: i + 1, i + 1: i}
        return Perm(tuple(swap.get(x, x) for x in self.images))

    def has_right_descent(self, i: int) -> bool:
        return self.images[i - 1] > self.images[i]

    def has_left_descent(self, i: int) -> bool:
        return self.images.index(i) > self.images.index(i + 1)

    @cached_property
    def length(self) -> int:
        im = self.images
        return sum(1 for a in range(len(im)) for b in range(a + 1, len(im)) if im[a] > im[b])

    @cached_property
    def reduced_word(self) -> tuple:
        """Lexicographically least reduced word."""
        word = []
        w = self
        while w.length:
            i = next(i for i in range(1, self.n) if w.has_left_descent(i))
            word.append(i)
            w = w.left_mul(i)
        return tuple(word)

    def restrict(self) -> "Perm":
        """View an element of S_{n-1} x S_1 (fixing n) as an element of S_{n-1}."""
        if self.images[-1] != self.n:
            raise ValueError(f"{self} does not fix {self.n}")
        return Perm(self.images[:-1])

    def extend(self, m: int) -> "Perm":
        return Perm(self.images + tuple(range(self.n + 1, m + 1)))

    def bruhat_le(self, other: "Perm") -> bool:
        """Tableau criterion for the Bruhat order on S_n."""
        if self.n != other.n:
            raise StrandMismatch("Bruhat comparison across different n")
        for k in range(1, self.n):
            a = sorted(self.images[:k])
            b = sorted(other.images[:k])
            if any(x > y for x, y in zip(a, b)):
                return False
        return True

    def __repr__(self):
        return "Perm(" + "".join(map(str, self.images)) + ")"


@lru_cache(maxsize=None)
def symmetric_group(n: int) -> tuple:
    """All of S_n, sorted by length then images."""
    perms = [Perm(p) for p in itertools.permutations(range(1, n + 1))]
    return tuple(sorted(perms, key=lambda w: (w.length, w.images)))


def longest_element(n: int) -> Perm:
    return Perm(tuple(range(n, 0, -1)))


def coset_factor(w: Perm) -> tuple[Perm, int]:
    """Factor w = u * d, u in S_{n-1} x S_1, d = s_{n-1} s_{n-2} ... s_k minimal in its coset.

    Returns ``(u, k)`` with ``k = w^{-1}(n)``; ``k = n`` means ``d = e``.
    Lengths add: l(w) = l(u) + (n - k).
    """
    n = w.n
    k = w.images.index(n) + 1
    u = w
    # w = u d  =>  u = w d^{-1},  d^{-1} = s_k s_{k+1} ... s_{n-1}
    for i in range(k, n):
        u = u.right_mul(i)
    return u, k


# ---------------------------------------------------------------------------
# braid words


@dataclass(frozen=True)
class BraidWord:
    """A braid on ``n`` strands as a sequence of signed generator indices."""

    n: int
    letters: tuple = ()

    def __post_init__(self):
        for k in self.letters:
            if k == 0 or abs(k) > self.n - 1:
                raise IndexOutOfRange(f"generator {k} outside 1..{self.n - 1}")

    @classmethod
    def parse(cls, n: int, text: str) -> "BraidWord":
        letters = []
        for pos, tok in enumerate(text.split(), 1):
            try:
                k = int(tok)
            except ValueError:
                raise ParseError(f"token {pos} ({tok!r}) is not a signed integer", pos) from None
            if k == 0 or abs(k) > n - 1:
                raise ParseError(f"token {pos} ({tok!r}) is not a generator of B_{n}", pos)
            letters.append(k)
        return cls(n, tuple(letters))

    @classmethod
    def positive_lift(cls, w: Perm) -> "BraidWord":
        return cls(w.n, tuple(w.reduced_word))

    @classmethod
    def negative_lift(cls, w: Perm) -> "BraidWord":
        """The inverse of the positive lift of w^{-1} (so F(...) = F_{w^{-1}}^{-1})."""
        return cls(w.n, tuple(-i for i in w.reduced_word))

    @property
    def writhe(self) -> int:
        return sum(1 if k > 0 else -1 for k in self.letters)

    @property
    def n_positive(self) -> int:
        return sum(1 for k in self.letters if k > 0)

    @property
    def n_negative(self) -> int:
        return sum(1 for k in self.letters if k < 0)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if self.n != other.n:
            raise StrandMismatch(f"cannot concatenate braids on {self.n} and {other.n} strands")
        return BraidWord(self.n, self.letters + other.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.n, tuple(-k for k in reversed(self.letters)))

    def extend(self, m: int) -> "BraidWord":
        """The same braid with extra straight strands on the right."""
        return BraidWord(m, self.letters)

    def __str__(self):
        return " ".join(map(str, self.letters))


# ---------------------------------------------------------------------------
# Hecke algebra


class HeckeElt:
    """Element of H_n: sparse map Perm -> LaurentRat in the positive standard basis."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Mapping[Perm, LaurentRat] | None = None):
        self.n = n
        self.coeffs = {w: LaurentRat.coerce(c) for w, c in (coeffs or {}).items() if c}

    @classmethod
    def one(cls, n: int) -> "HeckeElt":
        return cls(n, {Perm.identity(n): ONE})

    @classmethod
    def basis(cls, w: Perm) -> "HeckeElt":
        return cls(w.n, {w: ONE})

    @classmethod
    def generator(cls, n: int, i: int) -> "HeckeElt":
        if not 1 <= i <= n - 1:
            raise IndexOutOfRange(f"H_{i} not in H_{n}")
        return cls.basis(Perm.identity(n).right_mul(i))

    @classmethod
    def generator_inverse(cls, n: int, i: int) -> "HeckeElt":
        return cls.generator(n, i) + cls.one(n) * (V - VINV)

    def _check(self, other: "HeckeElt"):
        if self.n != other.n:
            raise StrandMismatch(f"H_{self.n} vs H_{other.n}")

    def __add__(self, other: "HeckeElt") -> "HeckeElt":
        self._check(other)
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, ZERO) + c
        return HeckeElt(self.n, out)

    def __neg__(self):
        return HeckeElt(self.n, {w: -c for w, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "HeckeElt":
        c = LaurentRat.coerce(c)
        return HeckeElt(self.n, {w: c * x for w, x in self.coeffs.items()})

    def mul_generator(self, i: int) -> "HeckeElt":
        """Right multiplication by H_i."""
        out: dict = {}
        z = VINV - V
        for w, c in self.coeffs.items():
            ws = w.right_mul(i)
            out[ws] = out.get(ws, ZERO) + c
            if w.has_right_descent(i):
                out[w] = out.get(w, ZERO) + c * z
        return HeckeElt(self.n, out)

    def __mul__(self, other):
        if not isinstance(other, HeckeElt):
            return self.scale(other)
        self._check(other)
        total: dict = {}
        for w, c in other.coeffs.items():
            part = self
            for i in w.reduced_word:
                part = part.mul_generator(i)
            for u, d in part.coeffs.items():
                total[u] = total.get(u, ZERO) + d * c
        return HeckeElt(self.n, total)

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, HeckeElt):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, frozenset(self.coeffs.items())))

    def coefficient(self, w: Perm) -> LaurentRat:
        return self.coeffs.get(w, ZERO)

    def map_coeffs(self, f) -> "HeckeElt":
        return HeckeElt(self.n, {w: f(c) for w, c in self.coeffs.items()})

    def embed(self, m: int) -> "HeckeElt":
        return HeckeElt(m, {w.extend(m): c for w, c in self.coeffs.items()})

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = [f"({c})*H[{''.join(map(str, w.images))}]" for w, c in
                 sorted(self.coeffs.items(), key=lambda t: (t[0].length, t[0].images))]
        return " + ".join(parts)


def hecke_mul(x: HeckeElt, y: HeckeElt) -> HeckeElt:
    return x * y


def word_element(n: int, letters: Iterable[int]) -> HeckeElt:
    """Product of H_i^{sign} along a signed word."""
    x = HeckeElt.one(n)
    for k in letters:
        if k > 0:
            x = x.mul_generator(k)
        else:
            x = x * HeckeElt.generator_inverse(n, -k)
    return x


def braid_to_hecke(b: BraidWord) -> HeckeElt:
    return word_element(b.n, b.letters)


@lru_cache(maxsize=None)
def negative_basis_matrix(n: int) -> dict:
    """w -> H_{w^{-1}}^{-1} in the positive basis.

    If w = s_{i_1} ... s_{i_k} is reduced then w^{-1} = s_{i_k} ... s_{i_1} and
    H_{w^{-1}}^{-1} = H_{i_1}^{-1} ... H_{i_k}^{-1}.
    """
    return {w: word_element(n, [-i for i in w.reduced_word]) for w in symmetric_group(n)}


def to_negative_basis(x: HeckeElt) -> dict:
    """Coefficients psi_w with x = sum psi_w H_{w^{-1}}^{-1} (Bruhat-triangular back-substitution)."""
    neg = negative_basis_matrix(x.n)
    rest = dict(x.coeffs)
    psi = {}
    while rest:
        w = max(rest, key=lambda u: (u.length, u.images))
        c = rest[w]
        psi[w] = c
        for u, d in neg[w].coeffs.items():
            val = rest.get(u, ZERO) - c * d
            if val:
                rest[u] = val
            else:
                rest.pop(u, None)
    return psi


def from_negative_basis(n: int, psi: Mapping[Perm, LaurentRat]) -> HeckeElt:
    neg = negative_basis_matrix(n)
    out = HeckeElt(n)
    for w, c in psi.items():
        out = out + neg[w].scale(c)
    return out


def epsilon(x: HeckeElt) -> LaurentRat:
    """Coefficient of H_e^{-1} = 1 in the negative standard basis."""
    return to_negative_basis(x).get(Perm.identity(x.n), ZERO)


def dual_anti(x: HeckeElt) -> HeckeElt:
    """Anti-automorphism with H_i -> H_i^{-1}, v -> v^{-1}; H_w -> H_w^{-1}."""
    out = HeckeElt(x.n)
    for w, c in x.coeffs.items():
        hw_inv = word_element(x.n, [-i for i in reversed(w.reduced_word)])
        out = out + hw_inv.scale(c.bar())
    return out


def pairing(x: HeckeElt, y: HeckeElt) -> LaurentRat:
    """<x, y> = epsilon(y x^vee)."""
    if x.n != y.n:
        raise StrandMismatch(f"H_{x.n} vs H_{y.n}")
    return epsilon(y * dual_anti(x))


# ---------------------------------------------------------------------------
# partial traces

_ONE_MINUS_Q = ONE - Q


def _restrict(x: HeckeElt) -> HeckeElt:
    return HeckeElt(x.n - 1, {w.restrict(): c for w, c in x.coeffs.items()})


def _split(x: HeckeElt):
    """Yield (c, u, y_word) with x = sum c * H_u * H_{n-1} * H_{y_word}  and the d=e part separately."""
    n = x.n
    parabolic = {}
    crossing = []
    for w, c in x.coeffs.items():
        u, k = coset_factor(w)
        if k == n:
            parabolic[w] = c
        else:
            crossing.append((c, u, tuple(range(n - 2, k - 1, -1))))
    return HeckeElt(n, parabolic), crossing


@lru_cache(maxsize=None)
def _generator_gap(n: int) -> LaurentRat:
    """The scalar H_{n-1} - H_{n-1}^{-1}, computed in the algebra."""
    diff = HeckeElt.generator(n, n - 1) - HeckeElt.generator_inverse(n, n - 1)
    if set(diff.coeffs) - {Perm.identity(n)}:
        raise AssertionError("H - H^{-1} is not scalar")
    return diff.coefficient(Perm.identity(n))


def pi_sign(x: HeckeElt, sign: int) -> HeckeElt:
    """pi^+ (sign=+1) or pi^- (sign=-1): H_n -> H_{n-1}, from the defining rules."""
    n = x.n
    if n < 1:
        raise StrandMismatch("partial trace needs n >= 1")
    par, crossing = _split(x)
    out = _restrict(par).scale(ONE / _ONE_MINUS_Q)
    if sign > 0:
        # pi^+(x H_{n-1} y) = 0
        return out
    # pi^-(x H y) = pi^-(x H^{-1} y) + (H - H^{-1}) pi^-(x y), first term vanishes
    gap = _generator_gap(n) if n >= 2 else ZERO
    for c, u, yword in crossing:
        xy = HeckeElt.basis(u)
        for i in yword:
            xy = xy.mul_generator(i)
        out = out + _restrict(xy).scale(c * gap / _ONE_MINUS_Q)
    return out


def pi_plus(x: HeckeElt) -> HeckeElt:
    return pi_sign(x, +1)


def pi_minus(x: HeckeElt) -> HeckeElt:
    return pi_sign(x, -1)


def partial_trace(x: Mapping[int, HeckeElt] | HeckeElt, n: int | None = None) -> dict:
    """pi = pi^- + a pi^+ : H_n[a] -> H_{n-1}[a]."""
    if isinstance(x, HeckeElt):
        x = {0: x}
    out: dict = {}
    for k, elt in x.items():
        if n is not None and elt.n != n:
            raise StrandMismatch(f"expected an element of H_{n}, got H_{elt.n}")
        for deg, part in ((k, pi_minus(elt)), (k + 1, pi_plus(elt))):
            if part.coeffs:
                out[deg] = out[deg] + part if deg in out else part
    return out


def jones_ocneanu_trace(x: HeckeElt) -> dict:
    """Tr(x) as {a-degree: LaurentRat}, obtained by applying pi n times."""
    cur: dict = {0: x}
    for _ in range(x.n):
        cur = partial_trace(cur)
    empty = Perm(())
    return {k: e.coefficient(empty) for k, e in cur.items() if e.coefficient(empty)}


def trace_bottom(x: HeckeElt) -> LaurentRat:
    return jones_ocneanu_trace(x).get(0, ZERO)


def trace_top(x: HeckeElt) -> LaurentRat:
    return jones_ocneanu_trace(x).get(x.n, ZERO)


@lru_cache(maxsize=None)
def markov_constants(n: int) -> dict:
    """pi(H_{n-1}) and pi(H_{n-1}^{-1}) as a-polynomials in H_{n-1}[a] coefficient of 1."""
    e = Perm.identity(n - 1)
    pos = partial_trace(HeckeElt.generator(n, n - 1))
    neg = partial_trace(HeckeElt.generator_inverse(n, n - 1))
    return {
        "pi(H)": {k: x.coefficient(e) for k, x in pos.items() if x.coefficient(e)},
        "pi(H^-1)": {k: x.coefficient(e) for k, x in neg.items() if x.coefficient(e)},
    }


# ---------------------------------------------------------------------------
# special elements and HOMFLY-PT


def half_twist(n: int) -> HeckeElt:
    return HeckeElt.basis(longest_element(n))


def full_twist(n: int) -> HeckeElt:
    ht = half_twist(n)
    return ht * ht


def apoly_str(p: Mapping[int, LaurentRat]) -> str:
    if not p:
        return "0"
    parts = []
    for k in sorted(p):
        c = str(p[k])
        parts.append(f"({c})" if k == 0 else f"({c})*a" + (f"^{k}" if k != 1 else ""))
    return " + ".join(parts)


def homfly(b: BraidWord, normalized: bool = False) -> dict:
    """Jones-Ocneanu trace of the braid's image, as {a-degree: LaurentRat}.

    With ``normalized=True`` the result is divided by Tr(1) on one strand and
    multiplied by (-v^{-1})^{#positive} (a v)^{-#negative}, which makes it
    invariant under both Markov stabilisations (a-degrees may then go negative).
    """
    x = braid_to_hecke(b)
    if not normalized:
        return jones_ocneanu_trace(x)
    # Tr = Tr_1(1) * (the scalar left after n-1 partial traces)
    cur: dict = {0: x}
    for _ in range(x.n - 1):
        cur = partial_trace(cur)
    e1 = Perm.identity(1)
    scale = (-VINV) ** b.n_positive * V ** (-b.n_negative)
    return {k - b.n_negative: e.coefficient(e1) * scale for k, e in cur.items() if e.coefficient(e1)}


def random_element(n: int, rng: random.Random, density: float = 0.5, span: int = 2) -> HeckeElt:
    """Random element with small Laurent-polynomial coefficients (for property tests)."""
    coeffs = {}
    for w in symmetric_group(n):
        if rng.random() < density:
            c = LaurentRat.from_laurent({k: rng.randint(-3, 3) for k in range(-span, span + 1)})
            if c:
                coeffs[w] = c
    return HeckeElt(n, coeffs)
