"""Ground rings k[x^(1/2^oo)] and their truncation at x = 0.

Elements are finite sums of monomials x^q with dyadic exponents q.  The
level-n subring is k[y] with y = x^(1/2^n) (or k[y]/(y^(2^n)) in the
truncated variant); :func:`to_level_poly` restricts an element to it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .errors import ParseError, UsageError
from .poly import Poly, format_terms


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    kind: str  # "fp" or "q"
    p: int = 0

    def __post_init__(self):
        if self.kind == "fp":
            if not is_prime(self.p):
                raise UsageError(f"F_p needs a prime p, got {self.p}")
        elif self.kind == "q":
            if self.p != 0:
                raise UsageError("the rational field takes no modulus")
        else:
            raise UsageError(f"unknown field kind {self.kind!r}")

    @classmethod
    def fp(cls, p: int) -> "FieldSpec":
        return cls("fp", p)

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls("q", 0)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        text = text.strip().lower()
        if text in ("q", "qq", "rational"):
            return cls.rationals()
        m = re.fullmatch(r"fp:(\d+)", text)
        if not m:
            raise UsageError(f"bad field {text!r}; expected fp:<p> or q")
        return cls.fp(int(m.group(1)))

    @property
    def is_prime_field(self) -> bool:
        return self.kind == "fp"

    def norm(self, a):
        if self.kind == "fp":
            if isinstance(a, Fraction):
                return (a.numerator * pow(a.denominator, -1, self.p)) % self.p
            return a % self.p
        return a if isinstance(a, Fraction) else Fraction(a)

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        if self.kind == "fp":
            return pow(a, -1, self.p)
        return 1 / Fraction(a)

    def fmt(self, a) -> str:
        if self.kind == "q":
            a = Fraction(a)
            return str(a.numerator) if a.denominator == 1 else f"({a})"
        return str(a)

    def __str__(self) -> str:
        return f"fp:{self.p}" if self.kind == "fp" else "q"


@dataclass(frozen=True)
class RingSpec:
    variant: str = "domain"
    field: FieldSpec = FieldSpec("fp", 5)

    def __post_init__(self):
        if self.variant not in ("domain", "truncated"):
            raise UsageError(f"unknown ring variant {self.variant!r}")

    @property
    def truncated(self) -> bool:
        return self.variant == "truncated"

    def level_bound(self, n: int) -> int | None:
        """Nilpotency exponent of y at level n (None in the domain variant)."""
        return 1 << n if self.truncated else None

    def __str__(self) -> str:
        return f"{self.variant}/{self.field}"


DEFAULT_RING = RingSpec()


@total_ordering
@dataclass(frozen=True)
class DyadicExp:
    numerator: int
    log_den: int = 0

    def __post_init__(self):
        if self.numerator < 0 or self.log_den < 0:
            raise UsageError("dyadic exponents are nonnegative")
        if self.log_den and self.numerator % 2 == 0:
            raise UsageError("dyadic exponent is not normalized")

    @classmethod
    def of(cls, num: int, log_den: int = 0) -> "DyadicExp":
        if num < 0:
            raise UsageError("dyadic exponents are nonnegative")
        if num == 0:
            return cls(0, 0)
        while log_den and num % 2 == 0:
            num //= 2
            log_den -= 1
        return cls(num, log_den)

    @classmethod
    def from_fraction(cls, q) -> "DyadicExp":
        q = Fraction(q)
        d = q.denominator
        if d & (d - 1):
            raise UsageError(f"exponent {q} is not dyadic")
        return cls.of(q.numerator, d.bit_length() - 1)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.log_den)

    def __add__(self, other: "DyadicExp") -> "DyadicExp":
        k = max(self.log_den, other.log_den)
        return DyadicExp.of((self.numerator << (k - self.log_den))
                            + (other.numerator << (k - other.log_den)), k)

    def half(self) -> "DyadicExp":
        return DyadicExp.of(self.numerator, self.log_den + 1)

    def __lt__(self, other: "DyadicExp") -> bool:
        return self.value < other.value

    def __str__(self) -> str:
        if self.log_den == 0:
            return str(self.numerator)
        return f"({self.numerator}/{1 << self.log_den})"


ONE_EXP = DyadicExp(1, 0)
ZERO_EXP = DyadicExp(0, 0)


class RingElement:
    """Immutable element of V; terms map DyadicExp -> nonzero coefficient."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingSpec, terms: dict | None = None):
        clean = {}
        norm = ring.field.norm
        for e, a in (terms or {}).items():
            if not isinstance(e, DyadicExp):
                e = DyadicExp.from_fraction(e)
            if ring.truncated and e.value >= 1:
                continue
            a = norm(a)
            if a:
                clean[e] = a
        self.ring = ring
        self.terms = clean

    @classmethod
    def monomial(cls, ring: RingSpec, q, coeff=1) -> "RingElement":
        return cls(ring, {DyadicExp.from_fraction(q): coeff})

    @classmethod
    def const(cls, ring: RingSpec, c) -> "RingElement":
        return cls(ring, {ZERO_EXP: c})

    def _check(self, other: "RingElement"):
        if not isinstance(other, RingElement):
            raise UsageError("ring arithmetic needs two ring elements")
        if other.ring != self.ring:
            raise UsageError(f"mismatched rings: {self.ring} vs {other.ring}")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        out = dict(self.terms)
        for e, a in other.terms.items():
            out[e] = out.get(e, 0) + a
        return RingElement(self.ring, out)

    def __neg__(self) -> "RingElement":
        return RingElement(self.ring, {e: -a for e, a in self.terms.items()})

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def __mul__(self, other: "RingElement") -> "RingElement":
        return ring_mul(self, other)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"RingElement({self})"

    def __str__(self) -> str:
        items = sorted(self.terms.items(), key=lambda t: t[0], reverse=True)
        return format_terms(self.ring.field, items, "x", str)


def ring_mul(a: RingElement, b: RingElement) -> RingElement:
    a._check(b)
    acc: dict[DyadicExp, object] = {}
    for e1, c1 in a.terms.items():
        for e2, c2 in b.terms.items():
            e = e1 + e2
            acc[e] = acc.get(e, 0) + c1 * c2
    return RingElement(a.ring, acc)


def level_of(a: RingElement) -> int:
    return max((e.log_den for e in a.terms), default=0)


def to_level_poly(a: RingElement, n: int) -> Poly:
    field = a.ring.field
    terms = []
    for e, c in a.terms.items():
        if e.log_den > n:
            raise UsageError(f"exponent {e.value} of {a} does not live at level {n}")
        terms.append((e.numerator << (n - e.log_den), c))
    p = Poly.from_terms(field, terms)
    bound = a.ring.level_bound(n)
    return p.truncate(bound) if bound is not None else p


def from_level_poly(ring: RingSpec, p: Poly, n: int) -> RingElement:
    return RingElement(ring, {DyadicExp.of(e, n): c for e, c in p.c.items()})


# textual syntax --------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([xu])|(\^)|([-+*/()]))")


class _ElementParser:
    def __init__(self, text: str, ring: RingSpec, unit_level: int | None,
                 where: tuple | None):
        self.text = text
        self.ring = ring
        self.unit_level = unit_level
        self.where = where or (None, None, 0)
        self.toks = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m:
                self.fail(f"unexpected character {stripped[pos]!r}", pos)
            start = m.start(m.lastindex)
            self.toks.append((m.group(m.lastindex), m.lastindex, start))
            pos = m.end()
        self.i = 0

    def fail(self, msg: str, pos: int | None = None):
        path, line, col0 = self.where
        col = None if pos is None else col0 + pos + 1
        raise ParseError(f"{msg} in element {self.text.strip()!r}", path, line, col)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self, want: str | None = None):
        tok = self.peek()
        if tok[0] is None or (want is not None and tok[0] != want):
            self.fail(f"expected {want or 'token'}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> RingElement:
        if not self.toks:
            self.fail("empty element")
        out = self.expr()
        if self.i != len(self.toks):
            self.fail("trailing input", self.peek()[2])
        return out

    def expr(self) -> RingElement:
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> RingElement:
        acc = self.atom()
        while self.peek()[0] == "*":
            self.take()
            acc = acc * self.atom()
        return acc

    def _int(self) -> int:
        tok = self.take()
        if tok[1] != 1:
            self.fail("expected integer", tok[2])
        return int(tok[0])

    def _exponent(self) -> Fraction:
        if self.peek()[0] == "(":
            self.take("(")
            num = self._int()
            den = 1
            if self.peek()[0] == "/":
                self.take("/")
                den = self._int()
            self.take(")")
        else:
            num, den = self._int(), 1
        if den == 0:
            self.fail("zero denominator in exponent")
        return Fraction(num, den)

    def atom(self) -> RingElement:
        tok = self.peek()
        if tok[0] is None:
            self.fail("unexpected end of element", tok[2])
        if tok[1] == 1:
            num = self._int()
            val = Fraction(num)
            if self.peek()[0] == "/":
                self.take("/")
                den = self._int()
                if den == 0:
                    self.fail("division by zero", tok[2])
                val = Fraction(num, den)
            if self.ring.field.kind == "fp" and val.denominator % self.ring.field.p == 0:
                self.fail("coefficient denominator vanishes in the field", tok[2])
            return RingElement.const(self.ring, val)
        if tok[1] == 2:
            self.take()
            if tok[0] == "x":
                base = Fraction(1)
            else:
                if self.unit_level is None:
                    self.fail("the level uniformizer u is only valid inside level blocks", tok[2])
                base = Fraction(1, 1 << self.unit_level)
            q = Fraction(1)
            if self.peek()[0] == "^":
                self.take()
                q = self._exponent()
            q = base * q
            if q.denominator & (q.denominator - 1):
                self.fail(f"exponent {q} is not dyadic", tok[2])
            return RingElement.monomial(self.ring, q)
        if tok[0] == "(":
            self.take("(")
            inner = self.expr()
            self.take(")")
            return inner
        self.fail(f"unexpected {tok[0]!r}", tok[2])


def parse_element(text: str, ring: RingSpec = DEFAULT_RING, unit_level: int | None = None,
                  where: tuple | None = None) -> RingElement:
    """Parse ``3*x^(3/4) + 1``.  ``u`` stands for x^(1/2^unit_level) when given.

    ``where`` is an optional (path, line, column-offset) used in error messages.
    """
    return _ElementParser(text, ring, unit_level, where).parse()
