"""
Exact rational functions in one variable ``v`` over Q.

A value is stored canonically as ``v**e * N(v) / D(v)`` with ``N`` and ``D``
coprime, neither divisible by ``v``, and ``D`` monic.  The Hecke parameter is
``q = v**-2``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from flint import fmpq, fmpq_poly

_P1 = fmpq_poly([1])
_P0 = fmpq_poly([])


def _strip_v(poly: fmpq_poly) -> tuple[fmpq_poly, int]:
    """Split off the largest power of v dividing ``poly``."""
    cs = poly.coeffs()
    k = 0
    while k < len(cs) and cs[k] == 0:
        k += 1
    if k == 0:
        return poly, 0
    return fmpq_poly(cs[k:]), k


def _vpow(k: int) -> fmpq_poly:
    return fmpq_poly([0] * k + [1])


def _reverse(poly: fmpq_poly) -> fmpq_poly:
    return fmpq_poly(list(reversed(poly.coeffs())))


class LaurentRat:
    __slots__ = ("num", "den", "exp", "_hash")

    def __init__(self, num=None, den=None, exp: int = 0):
        if num is None:
            num = _P0
        elif not isinstance(num, fmpq_poly):
            num = fmpq_poly([fmpq(Fraction(num).numerator, Fraction(num).denominator)])
        if den is None:
            den = _P1
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if num == 0:
            self.num, self.den, self.exp = _P0, _P1, 0
            self._hash = None
            return
        num, k1 = _strip_v(num)
        den, k2 = _strip_v(den)
        exp += k1 - k2
        g = num.gcd(den)
        if g.degree() > 0:
            num, r1 = divmod(num, g)
            den, r2 = divmod(den, g)
        lead = den.coeffs()[-1]
        if lead != 1:
            num = num / lead
            den = den / lead
        self.num, self.den, self.exp = num, den, exp
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def v_power(cls, k: int) -> "LaurentRat":
        return cls(_P1, _P1, k)

    @classmethod
    def from_laurent(cls, coeffs: dict[int, object]) -> "LaurentRat":
        """Build sum c_k v**k from a mapping exponent -> rational coefficient."""
        coeffs = {k: Fraction(c) for k, c in coeffs.items() if c}
        if not coeffs:
            return cls()
        lo = min(coeffs)
        hi = max(coeffs)
        cs = [fmpq(coeffs.get(k, Fraction(0)).numerator, coeffs.get(k, Fraction(0)).denominator)
              for k in range(lo, hi + 1)]
        return cls(fmpq_poly(cs), _P1, lo)

    @classmethod
    def coerce(cls, x) -> "LaurentRat":
        if isinstance(x, LaurentRat):
            return x
        return cls(x)

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return self.num == 0

    def __bool__(self):
        return not self.is_zero()

    def is_laurent_polynomial(self) -> bool:
        return self.den == 1

    def laurent_coeffs(self) -> dict[int, Fraction]:
        """Exponent -> coefficient; only valid for Laurent polynomials."""
        if not self.is_laurent_polynomial():
            raise ValueError(f"{self} is not a Laurent polynomial")
        out = {}
        for i, c in enumerate(self.num.coeffs()):
            if c != 0:
                out[self.exp + i] = Fraction(int(c.p), int(c.q))
        return out

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = LaurentRat.coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        m = min(self.exp, other.exp)
        a = self.num * _vpow(self.exp - m) if self.exp > m else self.num
        b = other.num * _vpow(other.exp - m) if other.exp > m else other.num
        if self.den == other.den:
            return LaurentRat(a + b, self.den, m)
        return LaurentRat(a * other.den + b * self.den, self.den * other.den, m)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        out = LaurentRat.__new__(LaurentRat)
        out.num, out.den, out.exp, out._hash = -self.num, self.den, self.exp, None
        return out

    def __sub__(self, other):
        return self + (-LaurentRat.coerce(other))

    def __rsub__(self, other):
        return LaurentRat.coerce(other) - self

    def __mul__(self, other):
        other = LaurentRat.coerce(other)
        if self.is_zero() or other.is_zero():
            return LaurentRat()
        if self.den == 1 and other.den == 1:
            out = LaurentRat.__new__(LaurentRat)
            out.num, out.den, out.exp, out._hash = self.num * other.num, _P1, self.exp + other.exp, None
            return out
        return LaurentRat(self.num * other.num, self.den * other.den, self.exp + other.exp)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentRat":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return LaurentRat(self.den, self.num, -self.exp)

    def __truediv__(self, other):
        return self * LaurentRat.coerce(other).inverse()

    def __rtruediv__(self, other):
        return LaurentRat.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = LaurentRat(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def bar(self) -> "LaurentRat":
        """The involution v -> v^{-1}."""
        if self.is_zero():
            return self
        return LaurentRat(_reverse(self.num), _reverse(self.den),
                          -self.exp - self.num.degree() + self.den.degree())

    def __eq__(self, other):
        if not isinstance(other, LaurentRat):
            try:
                other = LaurentRat.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.exp == other.exp and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.exp, tuple(self.num.coeffs()), tuple(self.den.coeffs())))
        return self._hash

    # -- expansions ---------------------------------------------------
    def series_in_vinv(self, max_power: int) -> dict[int, Fraction]:
        """Expand as a Laurent series in u = v^{-1}; returns {k: coeff of v^{-k}} for k <= max_power.

        Valid because after reversing, the denominator has nonzero constant term.
        """
        if self.is_zero():
            return {}
        nd, dd = self.num.degree(), self.den.degree()
        # v^e N(v)/D(v) = u^{-(e+nd-dd)} * Nrev(u)/Drev(u)
        shift = -(self.exp + nd - dd)
        nrev = [Fraction(int(c.p), int(c.q)) for c in reversed(self.num.coeffs())]
        drev = [Fraction(int(c.p), int(c.q)) for c in reversed(self.den.coeffs())]
        nterms = max_power - shift + 1
        if nterms <= 0:
            return {}
        out = [Fraction(0)] * nterms
        d0 = drev[0]
        for k in range(nterms):
            s = nrev[k] if k < len(nrev) else Fraction(0)
            for j in range(1, min(k, len(drev) - 1) + 1):
                s -= drev[j] * out[k - j]
            out[k] = s / d0
        return {k + shift: c for k, c in enumerate(out) if c}

    def __repr__(self):
        return f"LaurentRat({self})"

    def __str__(self):
        if self.is_zero():
            return "0"

        def fmt(poly, e):
            terms = []
            for i, c in enumerate(poly.coeffs()):
                if c == 0:
                    continue
                k = e + i
                cs = str(c)
                if k == 0:
                    terms.append(cs)
                else:
                    mono = "v" if k == 1 else f"v^{k}"
                    terms.append(mono if cs == "1" else ("-" + mono if cs == "-1" else f"{cs}*{mono}"))
            return " + ".join(terms).replace("+ -", "- ")

        top = fmt(self.num, self.exp)
        if self.den == 1:
            return top
        return f"({top})/({fmt(self.den, 0)})"


V = LaurentRat.v_power(1)
VINV = LaurentRat.v_power(-1)
ONE = LaurentRat(1)
ZERO = LaurentRat()
#: The Hecke parameter q = v^{-2}.
Q = LaurentRat.v_power(-2)


def lsum(items: Iterable[LaurentRat]) -> LaurentRat:
    out = ZERO
    for x in items:
        out = out + x
    return out
