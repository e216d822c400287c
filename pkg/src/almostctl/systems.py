"""Level systems: directed systems M_n0 -> M_n0+1 -> ... of level modules.

A system stands for the V-module colim_n V (x)_{A_n} M_n.  Members and
transition matrices are produced on demand and memoized.  A transition
at level n is the matrix of bc(M_n) -> M_{n+1} in level n+1 coordinates.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import Callable, Sequence

from . import modules as lm
from .errors import UsageError
from .ground import DyadicExp, RingSpec, from_level_poly
from .matrix import Mat, block_diag, hstack, kron, solve
from .modules import LevelModule, ModuleMap
from .poly import Poly
from .runtime import check_level
from .verdict import Verdict, Witness

DEFAULT_HORIZON = 8


def birth_levels(base: int, N: int) -> range:
    """Levels whose elements are followed up to the horizon N.

    Elements can take several levels to die (a class killed by y^4 under
    transitions y needs three), so only births in the lower half of
    [base, N] are tracked; each gets at least half the window to settle.
    """
    if N <= base:
        return range(N, N + 1)
    return range(base, base + (N - base) // 2 + 1)


def describe_vector(ring: RingSpec, level: int, col: Sequence[Poly], names: str = "e") -> str:
    parts = []
    for i, p in enumerate(col):
        if p:
            coeff = str(from_level_poly(ring, p, level))
            parts.append(f"({coeff})*{names}{i}" if len(p.c) > 1 else
                         (f"{names}{i}" if coeff == "1" else f"{coeff}*{names}{i}"))
    return " + ".join(parts) or "0"


class LevelSystem:
    def __init__(self, ring: RingSpec, base: int, member: Callable[[int], LevelModule],
                 transition: Callable[[int], Mat], name: str = "", *, constant: bool = False,
                 zero: bool = False, killed: bool = False):
        self.ring = ring
        self.base = base
        self.name = name or "system"
        self._member_fn = member
        self._transition_fn = transition
        self.constant = constant
        self.zero = zero
        # every member M_n is killed by the level uniformizer y_n
        self.killed = killed
        self._members: dict[int, LevelModule] = {}
        self._trans: dict[int, Mat] = {}
        self._push: dict[tuple[int, int], Mat] = {}
        self._lock = threading.RLock()

    @property
    def field(self):
        return self.ring.field

    def member(self, n: int) -> LevelModule:
        if n < self.base:
            raise UsageError(f"{self.name} starts at level {self.base}, asked for {n}")
        m = self._members.get(n)
        if m is not None:
            return m
        check_level(n, self.name)
        with self._lock:
            m = self._members.get(n)
            if m is None:
                m = self._member_fn(n)
                if m.level != n or m.ring != self.ring:
                    raise UsageError(f"{self.name}: member at level {n} is malformed")
                self._members[n] = m
        return m

    def transition(self, n: int) -> Mat:
        t = self._trans.get(n)
        if t is not None:
            return t
        with self._lock:
            t = self._trans.get(n)
            if t is None:
                a, b = self.member(n), self.member(n + 1)
                t = self._transition_fn(n)
                if t.shape != (b.gens, a.gens):
                    raise UsageError(f"{self.name}: transition at level {n} has shape {t.shape}")
                t = t.truncate(b.bound)
                self._trans[n] = t
        return t

    def transition_map(self, n: int, check: bool = False) -> ModuleMap:
        return ModuleMap(lm.base_change(self.member(n)), self.member(n + 1),
                         self.transition(n), check=check)

    def push_matrix(self, m: int, N: int) -> Mat:
        """Matrix of M_m -> M_N; a level-m vector v maps to P @ v(y^(2^(N-m)))."""
        if N < m:
            raise UsageError("push goes up in level")
        if N == m:
            return Mat.identity(self.field, self.member(m).gens)
        key = (m, N)
        p = self._push.get(key)
        if p is None:
            prev = self.push_matrix(m, N - 1)
            p = (self.transition(N - 1) @ prev.substitute_power(2)).truncate(self.member(N).bound)
            with self._lock:
                self._push[key] = p
        return p

    def push(self, m: int, N: int, v: Mat) -> Mat:
        return self.push_matrix(m, N) @ v.substitute_power(1 << (N - m))

    def check(self, upto: int) -> None:
        """Verify every transition up to ``upto`` respects relations."""
        for n in range(self.base, upto):
            self.transition_map(n, check=True)

    def __repr__(self) -> str:
        return f"LevelSystem({self.name}, base={self.base})"


class SystemMap:
    def __init__(self, source: LevelSystem, target: LevelSystem, matrix: Callable[[int], Mat],
                 name: str = "", *, base: int | None = None):
        if source.ring != target.ring:
            raise UsageError("system map between different rings")
        self.source = source
        self.target = target
        self.name = name or "map"
        self.base = max(source.base, target.base) if base is None else base
        self._fn = matrix
        self._cache: dict[int, Mat] = {}
        self._lock = threading.Lock()

    @property
    def ring(self):
        return self.source.ring

    def matrix(self, n: int) -> Mat:
        m = self._cache.get(n)
        if m is None:
            m = self._fn(n)
            s, t = self.source.member(n), self.target.member(n)
            if m.shape != (t.gens, s.gens):
                raise UsageError(f"{self.name}: matrix at level {n} has shape {m.shape}, "
                                 f"expected {(t.gens, s.gens)}")
            m = m.truncate(t.bound)
            with self._lock:
                self._cache[n] = m
        return m

    def at(self, n: int, check: bool = False) -> ModuleMap:
        return ModuleMap(self.source.member(n), self.target.member(n), self.matrix(n), check=check)

    def check(self, upto: int) -> None:
        """Well-definedness and commuting squares at every level in [base, upto]."""
        for n in range(self.base, upto + 1):
            self.at(n, check=True)
            if n < upto:
                lhs = self.target.transition(n) @ self.matrix(n).substitute_power(2)
                rhs = self.matrix(n + 1) @ self.source.transition(n)
                if not self.target.member(n + 1).contains(lhs - rhs):
                    raise UsageError(f"{self.name}: square at level {n} does not commute")

    def __matmul__(self, other: "SystemMap") -> "SystemMap":
        return SystemMap(other.source, self.target,
                         lambda n: self.matrix(n) @ other.matrix(n),
                         f"{self.name}.{other.name}", base=max(self.base, other.base))

    def __add__(self, other: "SystemMap") -> "SystemMap":
        return SystemMap(self.source, self.target, lambda n: self.matrix(n) + other.matrix(n),
                         f"({self.name}+{other.name})", base=max(self.base, other.base))

    def __sub__(self, other: "SystemMap") -> "SystemMap":
        return SystemMap(self.source, self.target, lambda n: self.matrix(n) - other.matrix(n),
                         f"({self.name}-{other.name})", base=max(self.base, other.base))

    def __neg__(self) -> "SystemMap":
        return SystemMap(self.source, self.target, lambda n: -self.matrix(n), f"-{self.name}",
                         base=self.base)

    def scale(self, c) -> "SystemMap":
        f = self.ring.field
        p = Poly.const(f, c)
        return SystemMap(self.source, self.target, lambda n: self.matrix(n).scale(p),
                         f"{c}*{self.name}", base=self.base)

    def __repr__(self) -> str:
        return f"SystemMap({self.name}: {self.source.name} -> {self.target.name})"


# built-in systems -----------------------------------------------------------

def constant_system(m0: LevelModule, name: str = "") -> LevelSystem:
    cache = {m0.level: m0}

    def member(n):
        if n not in cache:
            cache[n] = lm.base_change(member(n - 1))
        return cache[n]

    return LevelSystem(m0.ring, m0.level, member,
                       lambda n: Mat.identity(m0.field, m0.gens),
                       name or "const", constant=True, zero=(m0.gens == 0))


def constant_map(f: ModuleMap, source: LevelSystem, target: LevelSystem,
                 name: str = "") -> SystemMap:
    """Base-changed copies of one module map (sources/targets are constant systems)."""
    base = f.source.level

    def fn(n):
        return f.matrix.substitute_power(1 << (n - base))

    return SystemMap(source, target, fn, name or "const-map", base=max(base, source.base,
                                                                        target.base))


def unit_system(ring: RingSpec) -> LevelSystem:
    return constant_system(lm.free(ring, 0, 1), "V")


def zero_system(ring: RingSpec, base: int = 0) -> LevelSystem:
    return LevelSystem(ring, base, lambda n: lm.zero_module(ring, n),
                       lambda n: Mat(ring.field, 0, 0), "0", constant=True, zero=True, killed=True)


def ideal_system(ring: RingSpec, power: int = 1, base: int = 0,
                 name: str = "") -> tuple[LevelSystem, SystemMap]:
    """The ideal generated at level n by y_n^power, with its inclusion into V.

    power = 1 gives I = (x^(1/2^oo)); larger powers give shifted copies
    with the same colimit.
    """
    field = ring.field

    def member(n):
        e = ring.level_bound(n)
        if e is None:
            return lm.free(ring, n, 1)
        return lm.cyclic(ring, n, Poly.monomial(field, max(e - power, 0)))

    name = name or ("I" if power == 1 else f"I[{power}]")
    sys_ = LevelSystem(ring, base, member, lambda n: Mat.from_rows(field, [[Poly.monomial(field, power)]]),
                       name)
    V = unit_system(ring)
    j = SystemMap(sys_, V, lambda n: Mat.from_rows(field, [[Poly.monomial(field, power)]]),
                  f"j:{name}->V")
    return sys_, j


def tilde_ideal(ring: RingSpec) -> tuple[LevelSystem, SystemMap]:
    """I (x) I with its map to V, tilde-j = mu o (j (x) j)."""
    I, j = ideal_system(ring)
    T = sys_tensor(I, I, "I~")
    field = ring.field
    jt = SystemMap(T, j.target, lambda n: Mat.from_rows(field, [[Poly.monomial(field, 2)]]),
                   "j~:I~->V")
    return T, jt


def quotient_by_ideal(ring: RingSpec) -> LevelSystem:
    """V/I as the levelwise cokernel of j."""
    I, j = ideal_system(ring)
    Q = sys_cokernel(j, "V/I")
    Q.killed = True
    return Q


def cyclic_quotient(ring: RingSpec, q) -> LevelSystem:
    """Constant system V/(x^q)."""
    e = DyadicExp.from_fraction(Fraction(q))
    n = e.log_den
    p = Poly.monomial(ring.field, e.numerator)
    return constant_system(lm.cyclic(ring, n, p), f"V/(x^{e})")


def free_system(ring: RingSpec, rank: int) -> LevelSystem:
    return constant_system(lm.free(ring, 0, rank), f"V^{rank}")


# constructions ---------------------------------------------------------------

def sys_tensor(S: LevelSystem, T: LevelSystem, name: str = "") -> LevelSystem:
    if S.ring != T.ring:
        raise UsageError("tensor of systems over different rings")
    out = LevelSystem(S.ring, max(S.base, T.base),
                      lambda n: lm.tensor(S.member(n), T.member(n)),
                      lambda n: kron(S.transition(n), T.transition(n)),
                      name or f"({S.name}(x){T.name})",
                      constant=S.constant and T.constant, zero=S.zero or T.zero,
                      killed=S.killed or T.killed)
    out.factors = (S, T)
    return out


def map_tensor(f: SystemMap, g: SystemMap, source: LevelSystem | None = None,
               target: LevelSystem | None = None) -> SystemMap:
    src = source or sys_tensor(f.source, g.source)
    tgt = target or sys_tensor(f.target, g.target)
    return SystemMap(src, tgt, lambda n: kron(f.matrix(n), g.matrix(n)),
                     f"({f.name}(x){g.name})", base=max(f.base, g.base, src.base, tgt.base))


def sys_sum(parts: Sequence[LevelSystem], name: str = "", ring: RingSpec | None = None) -> LevelSystem:
    parts = list(parts)
    if not parts:
        if ring is None:
            raise UsageError("empty sum needs a ring")
        return zero_system(ring)
    ring = parts[0].ring
    if any(p.ring != ring for p in parts):
        raise UsageError("sum of systems over different rings")
    field = ring.field
    base = max(p.base for p in parts)
    out = LevelSystem(ring, base,
                      lambda n: lm.direct_sum([p.member(n) for p in parts], ring, n),
                      lambda n: block_diag(field, [p.transition(n) for p in parts]),
                      name or "(" + "+".join(p.name for p in parts) + ")",
                      constant=all(p.constant for p in parts), zero=all(p.zero for p in parts),
                      killed=all(p.killed for p in parts))
    out.summands = tuple(parts)
    return out


def identity_map(S: LevelSystem) -> SystemMap:
    return SystemMap(S, S, lambda n: Mat.identity(S.field, S.member(n).gens), f"id:{S.name}")


def zero_map(S: LevelSystem, T: LevelSystem) -> SystemMap:
    return SystemMap(S, T, lambda n: Mat(S.field, T.member(n).gens, S.member(n).gens), "0")


def sys_cokernel(f: SystemMap, name: str = "") -> LevelSystem:
    """Levelwise N_n / f(M_n); generators are those of N so transitions are inherited."""
    N = f.target

    def member(n):
        t = N.member(n)
        return LevelModule(N.ring, n, t.gens, hstack(N.field, [t.rels, f.matrix(n)]))

    return LevelSystem(N.ring, f.base, member, N.transition, name or f"coker({f.name})",
                       constant=False)


def sys_kernel(f: SystemMap, name: str = "") -> tuple[LevelSystem, SystemMap]:
    M = f.source
    cache: dict[int, tuple] = {}

    def ker(n):
        if n not in cache:
            cache[n] = lm.kernel(f.at(n))
        return cache[n]

    def transition(n):
        K1, inc1 = ker(n + 1)
        K0, inc0 = ker(n)
        img = M.transition(n) @ inc0.matrix.substitute_power(2)
        L = lm.lift(inc1, img)
        if L is None:
            raise UsageError("kernel transition does not lift")
        return L

    K = LevelSystem(M.ring, f.base, lambda n: ker(n)[0], transition, name or f"ker({f.name})")
    inc = SystemMap(K, M, lambda n: ker(n)[1].matrix, f"incl:{K.name}")
    return K, inc


def action_map(S: LevelSystem, power: int, name: str = "") -> SystemMap:
    """Levelwise multiplication by y_n^power on S (e.g. I (x) S -> S uses power 1)."""
    field = S.field
    return SystemMap(S, S, lambda n: Mat.scalar(field, S.member(n).gens, Poly.monomial(field, power)),
                     name or f"y^{power}")


def multiplication_map(ideal: LevelSystem, power: int, S: LevelSystem) -> SystemMap:
    """ideal (x) S -> S for a one-generator ideal system whose generator is y^power."""
    src = sys_tensor(ideal, S)
    field = S.field

    def fn(n):
        if ideal.member(n).gens != 1:
            raise UsageError("multiplication map needs a one-generator ideal")
        return Mat.scalar(field, S.member(n).gens, Poly.monomial(field, power))

    return SystemMap(src, S, fn, f"mu:{ideal.name}(x){S.name}")


# predicates ------------------------------------------------------------------

def _first_nonzero_column(mod: LevelModule, v: Mat) -> int | None:
    for j in range(v.ncols):
        if not mod.contains(v.select_cols([j])):
            return j
    return None


def is_zero(S: LevelSystem, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """Colimit vanishing: everything born below the horizon dies by the horizon."""
    if S.zero:
        return Verdict.certified("zero system", horizon)
    if S.constant:
        m0 = S.member(S.base)
        if m0.is_zero():
            return Verdict.certified("constant system with zero member", horizon)
        return Verdict.fail(Witness(S.base, f"constant nonzero member {m0.describe()}"), horizon)
    N = max(horizon, S.base)
    top = S.member(N)
    if N == S.base:
        if top.is_zero():
            return Verdict.up_to(N, "member at the horizon is zero")
        return Verdict.fail(Witness(N, f"member {top.describe()} is nonzero"), N)
    for m in birth_levels(S.base, N):
        g = S.member(m).gens
        if not g:
            continue
        pushed = S.push_matrix(m, N)
        j = _first_nonzero_column(top, pushed)
        if j is not None:
            return Verdict.fail(Witness(m, f"generator e{j} of {S.name} survives to level {N}"), N)
    born = birth_levels(S.base, N)
    return Verdict.up_to(N, f"all generators from levels {born[0]}..{born[-1]} die by level {N}")


def is_almost_zero(S: LevelSystem, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """x^(1/2^m) kills the image of M_m by level N, for every level m below the horizon N."""
    if S.zero:
        return Verdict.certified("zero system", horizon)
    if S.killed:
        return Verdict.certified("every member is killed by its level uniformizer", horizon)
    N = max(horizon, S.base)
    top = S.member(N)
    field = S.field
    for m in birth_levels(S.base, N):
        g = S.member(m).gens
        if not g:
            continue
        ym = Mat.scalar(field, g, Poly.monomial(field, 1))
        pushed = S.push(m, N, ym)
        j = _first_nonzero_column(top, pushed)
        if j is not None:
            elt = f"x^(1/{1 << m})*e{j}" if m else f"x*e{j}"
            where = "at" if m == N else "by"
            return Verdict.fail(Witness(m, f"{elt} of {S.name} is nonzero {where} level {N}"), N)
    if S.constant:
        return Verdict.certified("constant system whose module is killed by every x^q", horizon)
    return Verdict.up_to(N, f"x^(1/2^m)*M_m dies by level {N} for m <= {birth_levels(S.base, N)[-1]}")


def is_iso_colim(f: SystemMap, horizon: int = DEFAULT_HORIZON) -> Verdict:
    K, _ = sys_kernel(f)
    C = sys_cokernel(f)
    if f.source.constant and f.target.constant:
        n = f.base
        a = f.at(n)
        ok = a.is_iso()
        if ok:
            return Verdict.certified("constant map, iso at base level", horizon)
    vk = is_zero(K, horizon)
    vc = is_zero(C, horizon)
    from .verdict import combine
    return combine([("kernel", vk), ("cokernel", vc)], f"{f.name} colimit iso", horizon)


def is_firm(S: LevelSystem, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """I (x) S -> S becomes an isomorphism in the colimit."""
    if S.zero:
        return Verdict.certified("zero system", horizon)
    I, _ = ideal_system(S.ring)
    mu = multiplication_map(I, 1, S)
    return is_iso_colim(mu, horizon).with_detail(f"I(x){S.name} -> {S.name}")


class HomTower:
    """Stages T_m = Hom_{A_N}(bc S_m, M_N), m in [base, N], with restriction maps."""

    def __init__(self, S: LevelSystem, M: LevelSystem, horizon: int):
        self.S, self.M = S, M
        self.N = max(horizon, S.base, M.base)
        self.base = max(S.base, M.base)
        self._stages: dict[int, lm.HomModule] = {}

    def domain(self, m: int) -> LevelModule:
        mod = self.S.member(m)
        for _ in range(self.N - m):
            mod = lm.base_change(mod)
        return mod

    def stage(self, m: int) -> lm.HomModule:
        if m not in self._stages:
            self._stages[m] = lm.hom(self.domain(m), self.M.member(self.N))
        return self._stages[m]

    def restriction(self, m: int) -> Mat:
        """Matrix of T_{m+1} -> T_m, precomposition with bc S_m -> bc S_{m+1}."""
        hi, lo = self.stage(m + 1), self.stage(m)
        t = self.S.transition(m).substitute_power(1 << (self.N - m - 1))
        field = self.S.field
        cols = []
        for c in range(hi.module.gens):
            e = Mat(field, hi.module.gens, 1)
            e.rows[c][0] = Poly.const(field, 1)
            phi = hi.as_matrix(e) @ t
            cols.append(_flatten(phi))
        flat = hstack(field, cols, nrows=lo.source.gens * lo.target.gens) if cols else \
            Mat(field, lo.source.gens * lo.target.gens, 0)
        L = lm.lift(lo.embedding, flat)
        if L is None:
            raise UsageError("restriction does not land in the hom module")
        return L

    def stabilization(self) -> int | None:
        """Least stage from which every restriction map up to N is an isomorphism."""
        first = None
        for m in range(self.N - 1, self.base - 1, -1):
            f = ModuleMap(self.stage(m + 1).module, self.stage(m).module, self.restriction(m),
                          check=False)
            if f.is_iso():
                first = m
            else:
                break
        return first


def _flatten(phi: Mat) -> Mat:
    """N x M matrix -> column indexed a*N + b (generator a of the source)."""
    field = phi.field
    out = Mat(field, phi.nrows * phi.ncols, 1)
    for a in range(phi.ncols):
        for b in range(phi.nrows):
            out.rows[a * phi.nrows + b][0] = phi.rows[b][a]
    return out


def sys_hom_from(S: LevelSystem, M: LevelSystem, horizon: int = DEFAULT_HORIZON) -> HomTower:
    return HomTower(S, M, horizon)


def is_closed(S: LevelSystem, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """Unit S -> Hom(I~, S) is a pro-isomorphism on the tower up to the horizon."""
    if S.zero:
        return Verdict.certified("zero system", horizon)
    from .complexes import ChainComplex
    from .localization import closed_reflection, tower_contractible
    C = ChainComplex.single(S)
    refl = closed_reflection(C, horizon)
    return tower_contractible(refl.unit_cone(), horizon).with_detail(
        f"cone of the unit {S.name} -> Map(I~, {S.name}) is pro-zero")
