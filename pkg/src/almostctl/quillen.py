"""Brute-force check of the idempotent-ideal / bilocalization correspondence on
finite rings Z/n_1 x ... x Z/n_s.

Everything here is exhaustive enumeration over finite sets, so verdicts are
certified.  Ideals are found as principal ideals closed under sums (no
assumption that every ideal is principal), and I.I = I is recomputed from
the products of elements rather than from the idempotent generator.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from math import gcd, prod
from typing import Iterable, Sequence

from .errors import AlmostError, UsageError
from .verdict import Verdict, Witness, combine

DEFAULT_SIZE_BOUND = 10 ** 4


class SizeError(AlmostError):
    """A finite ring or module exceeds the configured size bound."""


Elem = tuple


@dataclass(frozen=True)
class FiniteRing:
    moduli: tuple

    def __post_init__(self):
        if not self.moduli or any(int(n) < 1 for n in self.moduli):
            raise UsageError("moduli must be positive integers")

    @classmethod
    def zn(cls, n: int) -> "FiniteRing":
        return cls((int(n),))

    @classmethod
    def parse(cls, text: str) -> "FiniteRing":
        """'6', 'Z/6' or '2x3' (a product)."""
        parts = [p.strip().removeprefix("Z/") for p in text.replace("*", "x").split("x")]
        try:
            return cls(tuple(int(p) for p in parts))
        except ValueError:
            raise UsageError(f"bad finite ring {text!r}") from None

    @property
    def size(self) -> int:
        return prod(self.moduli)

    def elements(self) -> list[Elem]:
        return list(itertools.product(*(range(n) for n in self.moduli)))

    def add(self, a: Elem, b: Elem) -> Elem:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.moduli))

    def mul(self, a: Elem, b: Elem) -> Elem:
        return tuple((x * y) % n for x, y, n in zip(a, b, self.moduli))

    def neg(self, a: Elem) -> Elem:
        return tuple((-x) % n for x, n in zip(a, self.moduli))

    @property
    def zero(self) -> Elem:
        return tuple(0 for _ in self.moduli)

    @property
    def one(self) -> Elem:
        return tuple(1 % n for n in self.moduli)

    def elem(self, *xs: int) -> Elem:
        if len(xs) != len(self.moduli):
            raise UsageError(f"{self} needs {len(self.moduli)} coordinates")
        return tuple(x % n for x, n in zip(xs, self.moduli))

    def fmt(self, a: Elem) -> str:
        return str(a[0]) if len(a) == 1 else "(" + ",".join(map(str, a)) + ")"

    def __str__(self) -> str:
        return "x".join(f"Z/{n}" for n in self.moduli)


def check_size(R: FiniteRing, bound: int = DEFAULT_SIZE_BOUND) -> None:
    if R.size > bound:
        raise SizeError(f"|{R}| = {R.size} exceeds the size bound {bound}")


# ideals ---------------------------------------------------------------------------------

def principal_ideal(R: FiniteRing, a: Elem) -> frozenset:
    return frozenset(R.mul(r, a) for r in R.elements())


def subgroup(R: FiniteRing, gens: Iterable[Elem]) -> frozenset:
    """Additive subgroup generated by gens."""
    gens = set(gens) - {R.zero}
    seen = {R.zero}
    frontier = [R.zero]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = R.add(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def ideal_sum(R: FiniteRing, I: frozenset, J: frozenset) -> frozenset:
    out = set(I)
    for b in J:
        if b not in out:
            out |= {R.add(a, b) for a in I}
    return frozenset(out)


def ideal_product(R: FiniteRing, I: frozenset, J: frozenset) -> frozenset:
    return subgroup(R, {R.mul(a, b) for a in I for b in J})


def enumerate_ideals(R: FiniteRing, bound: int = DEFAULT_SIZE_BOUND) -> list[frozenset]:
    check_size(R, bound)
    found: set[frozenset] = set()
    for a in R.elements():
        found.add(principal_ideal(R, a))
    while True:
        new = {ideal_sum(R, I, J) for I in found for J in found} - found
        if not new:
            break
        found |= new
    return sorted(found, key=lambda I: (len(I), sorted(I)))


@dataclass(frozen=True)
class IdempotentIdeal:
    ring: FiniteRing
    ideal: frozenset
    generator: Elem            # e with e^2 = e and (e) = ideal

    @property
    def size(self) -> int:
        return len(self.ideal)

    def label(self) -> str:
        return f"({self.ring.fmt(self.generator)})"


def is_idempotent_ideal(R: FiniteRing, I: frozenset) -> bool:
    return ideal_product(R, I, I) == I


def idempotent_generator(R: FiniteRing, I: frozenset) -> Elem | None:
    for e in sorted(I):
        if R.mul(e, e) == e and principal_ideal(R, e) == I:
            return e
    return None


def enumerate_idempotent_ideals(R: FiniteRing,
                                bound: int = DEFAULT_SIZE_BOUND) -> list[IdempotentIdeal]:
    """All I with I.I = I, each with an idempotent generator found by search."""
    out = []
    for I in enumerate_ideals(R, bound):
        if not is_idempotent_ideal(R, I):
            continue
        e = idempotent_generator(R, I)
        if e is None:
            raise UsageError(f"idempotent ideal of {R} without idempotent generator")
        out.append(IdempotentIdeal(R, I, e))
    return out


def idempotents(R: FiniteRing) -> list[Elem]:
    return [e for e in R.elements() if R.mul(e, e) == e]


def omega(n: int) -> int:
    """Number of distinct prime factors, by trial division."""
    count, p = 0, 2
    while p * p <= n:
        if n % p == 0:
            count += 1
            while n % p == 0:
                n //= p
        p += 1
    return count + (1 if n > 1 else 0)


# modules ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class FinModule:
    """Finite abelian group prod Z/orders[i] with an action of R.

    ``actions[c]`` is the integer matrix by which the c-th coordinate unit of
    R (the idempotent (0,..,1,..,0)) acts; r acts by sum_c r_c actions[c].
    """
    ring: FiniteRing
    orders: tuple
    actions: tuple
    name: str = "M"

    @property
    def size(self) -> int:
        return prod(self.orders)

    def elements(self) -> list[Elem]:
        return list(itertools.product(*(range(d) for d in self.orders)))

    @property
    def zero(self) -> Elem:
        return tuple(0 for _ in self.orders)

    def add(self, a: Elem, b: Elem) -> Elem:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.orders))

    def act(self, r: Elem, m: Elem) -> Elem:
        out = [0] * len(self.orders)
        for c, rc in enumerate(r):
            if not rc:
                continue
            A = self.actions[c]
            for i in range(len(out)):
                out[i] += rc * sum(A[i][j] * m[j] for j in range(len(m)))
        return tuple(x % d for x, d in zip(out, self.orders))

    def check(self) -> None:
        """The action is well defined and unital."""
        R = self.ring
        for r in R.elements():
            for s in R.elements():
                for m in self.generators():
                    if self.act(R.mul(r, s), m) != self.act(r, self.act(s, m)):
                        raise UsageError(f"{self.name}: action is not associative")
        for m in self.generators():
            if self.act(R.one, m) != m:
                raise UsageError(f"{self.name}: 1 does not act as the identity")

    def generators(self) -> list[Elem]:
        out = []
        for i in range(len(self.orders)):
            out.append(tuple(1 % d if j == i else 0 for j, d in enumerate(self.orders)))
        return out

    def image(self, r: Elem) -> frozenset:
        return frozenset(self.act(r, m) for m in self.elements())

    def submodule(self, gens: Iterable[Elem]) -> frozenset:
        R = self.ring
        gens = list(gens)
        orbit = {self.act(r, g) for g in gens for r in R.elements()}
        if len(gens) == 1:
            # R.m is already closed under addition
            return frozenset(orbit)
        seen = {self.zero}
        frontier = [self.zero]
        while frontier:
            nxt = []
            for x in frontier:
                for g in orbit:
                    y = self.add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)


def cyclic_module(R: FiniteRing, ds: Sequence[int]) -> FinModule:
    """R/J with J = prod d_c Z/n_c, i.e. prod Z/d_c with coordinate projections."""
    if any(n % d for d, n in zip(ds, R.moduli)):
        raise UsageError("each d must divide the matching modulus")
    k = len(ds)
    acts = tuple(tuple(tuple(1 if i == j == c else 0 for j in range(k)) for i in range(k))
                 for c in range(k))
    name = "x".join(f"Z/{d}" for d in ds)
    return FinModule(R, tuple(ds), acts, name)


def module_sum(M: FinModule, N: FinModule) -> FinModule:
    a, b = len(M.orders), len(N.orders)
    acts = []
    for c in range(len(M.ring.moduli)):
        A, B = M.actions[c], N.actions[c]
        rows = [tuple(A[i]) + (0,) * b for i in range(a)]
        rows += [(0,) * a + tuple(B[i]) for i in range(b)]
        acts.append(tuple(rows))
    return FinModule(M.ring, M.orders + N.orders, tuple(acts), f"{M.name}+{N.name}")


def battery(R: FiniteRing, order_bound: int | None = None) -> list[FinModule]:
    """Cyclic modules R/J and their sums of two, of order at most order_bound."""
    divs = [[d for d in range(1, n + 1) if n % d == 0] for n in R.moduli]
    cyc = [cyclic_module(R, ds) for ds in itertools.product(*divs)]
    bound = order_bound if order_bound is not None else R.size ** 2
    out = [M for M in cyc if M.size <= bound]
    for i, M in enumerate(cyc):
        for N in cyc[i:]:
            if M.size * N.size <= bound:
                out.append(module_sum(M, N))
    return out


# the splitting -----------------------------------------------------------------------

@dataclass
class SES:
    B: FinModule
    A: frozenset          # submodule of B; C = B/A


@functools.lru_cache(maxsize=256)
def short_exact_sequences(M: FinModule) -> list[SES]:
    """0 -> A -> M -> M/A -> 0 for every cyclic submodule A of M."""
    subs = {M.submodule([m]) for m in M.elements()}
    return [SES(M, A) for A in sorted(subs, key=lambda s: (len(s), sorted(s)))]


def _fail(what: str, R: FiniteRing, e: Elem, M: FinModule) -> Verdict:
    return Verdict.fail(Witness(None, f"{what} for e = {R.fmt(e)} on {M.name}"))


def splitting_check(R: FiniteRing, e: Elem, M: FinModule, maps_to: Sequence[FinModule] = (),
                    seed: int = 0) -> Verdict:
    """M = eM + (1-e)M, exactness of M -> eM, triangle identities and naturality."""
    if R.mul(e, e) != e:
        raise UsageError(f"{R.fmt(e)} is not idempotent")
    f = R.add(R.one, R.neg(e))
    eM, fM = M.image(e), M.image(f)
    # direct sum decomposition
    if eM & fM != {M.zero}:
        return _fail("eM and (1-e)M intersect", R, e, M)
    if {M.add(a, b) for a in eM for b in fM} != set(M.elements()):
        return _fail("eM + (1-e)M is not M", R, e, M)
    # exactness of M |-> eM on short exact sequences out of M
    for s in short_exact_sequences(M):
        eA = frozenset(M.act(e, a) for a in s.A)
        if eA != eM & s.A:
            return _fail("M |-> eM is not exact in the middle", R, e, M)
    # triangle identities: unit m |-> em of (projection -| inclusion), counit the inclusion
    for m in M.elements():
        em = M.act(e, m)
        if M.act(e, em) != em:
            return _fail("projection followed by unit is not the identity", R, e, M)
    for x in eM:
        if M.act(e, x) != x:
            return _fail("inclusion followed by projection is not the identity", R, e, M)
    # naturality along module maps M -> N
    for N in maps_to:
        for phi in module_maps(M, N, seed):
            for m in M.elements():
                if phi(M.act(e, m)) != N.act(e, phi(m)):
                    return _fail(f"splitting not natural along a map to {N.name}", R, e, M)
    return Verdict.certified(f"{M.name} = eM + (1-e)M for e = {R.fmt(e)}")


def module_maps(M: FinModule, N: FinModule, seed: int = 0, limit: int = 4):
    """A few R-linear maps M -> N, chosen by a seeded search over generator images."""
    import random
    rng = random.Random(seed)
    gens = M.generators()
    choices = N.elements()
    out = []
    tries = 0
    while len(out) < limit and tries < 50 * limit:
        tries += 1
        imgs = [rng.choice(choices) for _ in gens]
        phi = _extend(M, N, imgs)
        if phi is not None:
            out.append(phi)
    return out


def _extend(M: FinModule, N: FinModule, imgs: list) -> object | None:
    # m = sum m_i g_i  |->  sum m_i imgs[i]; must respect orders and the action
    for d, y in zip(M.orders, imgs):
        if any((d * yi) % o for yi, o in zip(y, N.orders)):
            return None

    def phi(m):
        return tuple(sum(mi * y[i] for mi, y in zip(m, imgs)) % d for i, d in enumerate(N.orders))

    R = M.ring
    for r in R.elements():
        for g in M.generators():
            if phi(M.act(r, g)) != N.act(r, phi(g)):
                return None
    return phi


# Serre classes ---------------------------------------------------------------------------

def in_class(R: FiniteRing, e: Elem, M: FinModule) -> bool:
    """M lies in S_e = {M : eM = 0}."""
    return M.image(e) == {M.zero}


def serre_closure_check(R: FiniteRing, e: Elem, mods: Sequence[FinModule]) -> Verdict:
    """S_e closed under submodules, quotients and extensions on the battery."""
    for M in mods:
        eM = M.image(e)
        for s in short_exact_sequences(M):
            inA = all(M.act(e, a) == M.zero for a in s.A)
            inC = eM <= s.A
            inB = eM == {M.zero}
            if inB and not (inA and inC):
                return _fail("S_e not closed under sub/quotient", R, e, M)
            if inA and inC and not inB:
                return _fail("S_e not closed under extensions", R, e, M)
    return Verdict.certified(f"S_{R.fmt(e)} is a Serre class on {len(mods)} modules")


@dataclass
class SerreReport:
    ring: FiniteRing
    ideals: list
    closure: dict = field(default_factory=dict)
    signatures: dict = field(default_factory=dict)
    distinct: Verdict | None = None

    def verdict(self) -> Verdict:
        parts = [(f"S{i.label()} closed", v) for i, v in self.closure.items()]
        parts.append(("distinct classes", self.distinct))
        return combine(parts, f"Serre correspondence on {self.ring}")

    def to_dict(self) -> dict:
        return {"ring": str(self.ring),
                "idempotent_ideals": [i.label() for i in self.ideals],
                "classes": {i.label(): self.signatures[i] for i in self.ideals},
                "verdict": self.verdict().to_dict(),
                "scope": "injectivity and closure only; surjectivity is not enumerable"}


def serre_correspondence_report(R: FiniteRing, bound: int = DEFAULT_SIZE_BOUND,
                                order_bound: int | None = None) -> SerreReport:
    ideals = enumerate_idempotent_ideals(R, bound)
    mods = battery(R, order_bound)
    rep = SerreReport(R, ideals)
    for I in ideals:
        rep.closure[I] = serre_closure_check(R, I.generator, mods)
        rep.signatures[I] = "".join("1" if in_class(R, I.generator, M) else "0" for M in mods)
    sigs = list(rep.signatures.values())
    if len(set(sigs)) == len(sigs):
        rep.distinct = Verdict.certified(f"{len(sigs)} pairwise distinct classes")
    else:
        dup = [i.label() for i in ideals if sigs.count(rep.signatures[i]) > 1]
        rep.distinct = Verdict.fail(Witness(None, f"ideals {', '.join(dup)} give the same class"))
    return rep


def count_check(max_n: int = 200, bound: int = DEFAULT_SIZE_BOUND) -> Verdict:
    """#idempotent ideals of Z/n == 2^omega(n) for 1 <= n <= max_n."""
    if max_n > bound:
        raise SizeError(f"Z/{max_n} exceeds the size bound {bound}")
    for n in range(1, max_n + 1):
        got = len(enumerate_idempotent_ideals(FiniteRing.zn(n), bound))
        want = 2 ** omega(n)
        if got != want:
            return Verdict.fail(Witness(None, f"Z/{n} has {got} idempotent ideals, "
                                              f"2^omega = {want}"))
    return Verdict.certified(f"idempotent-ideal counts match 2^omega(n) for n <= {max_n}")


def splitting_battery_check(R: FiniteRing, bound: int = DEFAULT_SIZE_BOUND,
                            order_bound: int | None = None, seed: int = 0) -> Verdict:
    mods = battery(R, order_bound)
    parts = []
    for I in enumerate_idempotent_ideals(R, bound):
        worst = None
        for M in mods:
            v = splitting_check(R, I.generator, M, maps_to=mods[:3], seed=seed)
            if not v.passed:
                worst = v
                break
        parts.append((f"e={R.fmt(I.generator)}",
                      worst or Verdict.certified(f"{len(mods)} modules split")))
    return combine(parts, f"splitting on {R}")
