"""Sparse univariate polynomials over an exact field, in the level variable y.

Coefficients are plain ints reduced mod p for prime fields and
:class:`fractions.Fraction` for the rational field.  Polynomials are
immutable; the zero polynomial has an empty term dict and degree -1.
"""

from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING, Iterable

if TYPE_CHECKING:
    from .ground import FieldSpec


class Poly:
    __slots__ = ("field", "c", "_hash")

    def __init__(self, field: "FieldSpec", terms: dict[int, object]):
        # callers guarantee: coefficients already reduced and nonzero
        self.field = field
        self.c = terms
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def from_terms(cls, field: "FieldSpec", terms: Iterable[tuple[int, object]]) -> "Poly":
        acc: dict[int, object] = {}
        norm = field.norm
        for e, a in terms:
            if e < 0:
                raise ValueError("negative exponent in polynomial")
            acc[e] = acc.get(e, 0) + a
        out = {}
        for e, a in acc.items():
            a = norm(a)
            if a:
                out[e] = a
        return cls(field, out)

    @classmethod
    def zero(cls, field: "FieldSpec") -> "Poly":
        return cls(field, {})

    @classmethod
    def const(cls, field: "FieldSpec", a) -> "Poly":
        a = field.norm(a)
        return cls(field, {0: a} if a else {})

    @classmethod
    def monomial(cls, field: "FieldSpec", e: int, a=1) -> "Poly":
        a = field.norm(a)
        return cls(field, {e: a} if a else {})

    # inspection ---------------------------------------------------------

    @property
    def degree(self) -> int:
        return max(self.c) if self.c else -1

    @property
    def lc(self):
        return self.c[max(self.c)] if self.c else 0

    @property
    def low_degree(self) -> int:
        """Exponent of the lowest nonzero term (-1 for zero)."""
        return min(self.c) if self.c else -1

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self) -> bool:
        return bool(self.c)

    def is_unit(self) -> bool:
        return len(self.c) == 1 and 0 in self.c

    def is_one(self) -> bool:
        return len(self.c) == 1 and self.c.get(0) == 1

    def is_monomial(self) -> bool:
        return len(self.c) == 1

    def coeff(self, e: int):
        return self.c.get(e, 0)

    # arithmetic ---------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        if not other.c:
            return self
        if not self.c:
            return other
        norm = self.field.norm
        out = dict(self.c)
        for e, a in other.c.items():
            s = norm(out.get(e, 0) + a)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly(self.field, out)

    def __neg__(self) -> "Poly":
        norm = self.field.norm
        return Poly(self.field, {e: norm(-a) for e, a in self.c.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        if not other.c:
            return self
        norm = self.field.norm
        out = dict(self.c)
        for e, a in other.c.items():
            s = norm(out.get(e, 0) - a)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly(self.field, out)

    def __mul__(self, other: "Poly") -> "Poly":
        if not self.c or not other.c:
            return Poly(self.field, {})
        norm = self.field.norm
        if len(other.c) == 1:
            (e2, a2), = other.c.items()
            if a2 == 1:
                return Poly(self.field, {e + e2: a for e, a in self.c.items()})
            return Poly(self.field, {e + e2: norm(a * a2) for e, a in self.c.items()})
        if len(self.c) == 1:
            return other * self
        acc: dict[int, object] = {}
        for e1, a1 in self.c.items():
            for e2, a2 in other.c.items():
                k = e1 + e2
                acc[k] = acc.get(k, 0) + a1 * a2
        out = {}
        for e, a in acc.items():
            a = norm(a)
            if a:
                out[e] = a
        return Poly(self.field, out)

    def scale(self, a) -> "Poly":
        norm = self.field.norm
        a = norm(a)
        if not a:
            return Poly(self.field, {})
        if a == 1:
            return self
        return Poly(self.field, {e: norm(b * a) for e, b in self.c.items()})

    def shift(self, k: int) -> "Poly":
        """Multiply by y**k."""
        return Poly(self.field, {e + k: a for e, a in self.c.items()})

    def __pow__(self, k: int) -> "Poly":
        out = Poly.const(self.field, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        db = max(other.c)
        if not self.c or max(self.c) < db:
            return Poly(self.field, {}), self
        field = self.field
        norm = field.norm
        inv_lc = field.inv(other.c[db])
        r = dict(self.c)
        q: dict[int, object] = {}
        others = [(e, a) for e, a in other.c.items() if e != db]
        while r:
            dr = max(r)
            if dr < db:
                break
            t = norm(r.pop(dr) * inv_lc)
            k = dr - db
            q[k] = t
            for e, a in others:
                kk = e + k
                s = norm(r.get(kk, 0) - t * a)
                if s:
                    r[kk] = s
                else:
                    r.pop(kk, None)
        return Poly(field, q), Poly(field, r)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def divides(self, other: "Poly") -> bool:
        """True when self | other."""
        if not other.c:
            return True
        if not self.c:
            return False
        if len(self.c) == 1:
            (e, _), = self.c.items()
            return min(other.c) >= e
        return not (other % self).c

    def monic(self) -> tuple["Poly", object]:
        """Return (monic associate, leading coefficient)."""
        if not self.c:
            return self, 0
        lc = self.lc
        if lc == 1:
            return self, 1
        return self.scale(self.field.inv(lc)), lc

    def substitute_power(self, k: int) -> "Poly":
        """Substitute y -> y**k (base change to a finer level uses k = 2)."""
        return Poly(self.field, {e * k: a for e, a in self.c.items()})

    def truncate(self, bound: int) -> "Poly":
        """Drop every term of degree >= bound."""
        if not self.c or max(self.c) < bound:
            return self
        return Poly(self.field, {e: a for e, a in self.c.items() if e < bound})

    # protocol -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.c == other.c
        if isinstance(other, int) and other == 0:
            return not self.c
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.c.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        return format_terms(self.field, sorted(self.c.items(), reverse=True), "y",
                            lambda e: str(e))


def format_terms(field, items, var: str, fmt_exp) -> str:
    if not items:
        return "0"
    parts = []
    for e, a in items:
        coeff = field.fmt(a)
        ex = fmt_exp(e)
        if ex == "0":
            mono = coeff
        else:
            power = var if ex == "1" else f"{var}^{ex}"
            mono = power if coeff == "1" else f"{coeff}*{power}"
        parts.append(mono)
    return " + ".join(parts)


def gcd(a: Poly, b: Poly) -> Poly:
    while b.c:
        a, b = b, a % b
    return a.monic()[0]


def as_fraction(a) -> Fraction:
    return a if isinstance(a, Fraction) else Fraction(a)
