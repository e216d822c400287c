"""Verification suites run by ``almostctl suite``.

A suite is a list of named checks.  Each check carries a descriptive anchor
naming the statement it exercises; ``PAPER_MAP`` lists the anchors every
suite must cover and the report records are sorted by check id so output is
independent of scheduling.
"""

from __future__ import annotations

import contextvars
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from . import arrows as ar
from . import complexes as cx
from . import localization as loc
from . import monoids as mo
from . import quillen as qu
from . import systems as ls
from .complexes import ChainComplex
from .ground import DEFAULT_RING, RingSpec
from .objfile import ObjectTable
from .runtime import limits
from .verdict import FAIL, HORIZON, CERTIFIED, Verdict, agree, combine, expect_fail

SUITES = ("idempotent", "lemma-bar", "theorem-a", "theorem-b", "cok-monoidal", "shriek",
          "quillen")
QUILLEN_RINGS = (4, 6, 12, 30)
ARROW_PAIRS = 10

A_TILDE_MULT = "idempotent ideal: I~ (x) I -> I~ is a quasi-isomorphism"
A_SMITH = "idempotent ideal: j[]j -> j weak equivalence, homotopy cartesian square, flatness"
A_FLAT = "homotopical flatness: Tor1(I~, M) vanishes on the corpus"
A_NEG_SCALAR = "negative control: multiplication by x^(1/2) is not an idempotent ideal"
A_ZERO_IDEAL = "the zero ideal 0 -> V is idempotent"
A_BAR_SYS = "almost zero iff I~ (x) M is contractible (level systems)"
A_BAR_CX = "almost zero iff I~ (x) M is contractible (complexes)"
A_NEG_AZ = "negative control: V/(x^(1/2)) is not almost zero"
A_TRIANGLE = "reflections: counit and unit almost equivalences, idempotence, contractibility biconditional"
A_LAX = "I~ (x) - is lax monoidal: (I~(x)M)(x)(I~(x)N) -> I~(x)(M(x)N) quasi-iso"
A_ROUNDTRIP = "round trip: the homotopy image of I~ -> V is an idempotent ideal equivalent to I"
A_COK_U0 = "cok(u0(V)) ~ l0(V)"
A_KER_L0 = "ker(l0(V)) ~ u0(V)"
A_COK_BOX = "Coker(f [] g) ~ Coker(f) (x) Coker(g) through a zig-zag"
A_KER_COK = "ker o cok ~ id and cok o ker ~ id on arrows"
A_MONOID = "input monoid satisfies unit, commutativity and associativity on homology"
A_SHRIEK_MONOID = "A_!! is a commutative monoid"
A_SHRIEK_WEQ = "A_!! -> A is an almost weak equivalence"
A_SHRIEK_IDEM = "(A_!!)_!! ~ A_!!"
A_SHRIEK_TENSOR = "A_!! (x) A_!! ~ (A (x) A)_!! for termwise flat carriers"
A_CLOSED = "Map(I~, A) satisfies the monoid laws stage by stage"
A_NEG_2MU = "negative control: 2*mu is not a monoid"
A_COUNT = "idempotent ideals of Z/n number 2^omega(n)"
A_SPLIT = "modules split along an idempotent ideal"
A_SERRE = "distinct idempotent ideals give distinct Serre classes"

PAPER_MAP: dict[str, tuple[str, ...]] = {
    "idempotent": (A_TILDE_MULT, A_SMITH, A_FLAT, A_NEG_SCALAR, A_ZERO_IDEAL),
    "lemma-bar": (A_BAR_SYS, A_BAR_CX, A_NEG_AZ),
    "theorem-a": (A_TRIANGLE, A_LAX),
    "theorem-b": (A_ROUNDTRIP,),
    "cok-monoidal": (A_COK_U0, A_KER_L0, A_COK_BOX, A_KER_COK),
    "shriek": (A_MONOID, A_SHRIEK_MONOID, A_SHRIEK_WEQ, A_SHRIEK_IDEM, A_SHRIEK_TENSOR,
               A_CLOSED, A_NEG_2MU),
    "quillen": (A_COUNT, A_SPLIT, A_SERRE),
}
PAPER_MAP["all"] = tuple(a for s in SUITES for a in PAPER_MAP[s])


@dataclass(frozen=True)
class Config:
    ring: RingSpec = DEFAULT_RING
    horizon: int = ls.DEFAULT_HORIZON
    corpus: str | None = None
    jobs: int = 1
    seed: int = 0
    report: str = "text"
    max_n: int = 200
    timings: bool = False


@dataclass(frozen=True)
class Check:
    id: str
    anchor: str
    run: Callable[[], Verdict]


@dataclass
class Record:
    id: str
    anchor: str
    verdict: Verdict
    duration: float | None = None

    def to_dict(self, timings: bool = False) -> dict:
        out = {"id": self.id, "anchor": self.anchor, "status": self.verdict.status,
               "horizon": self.verdict.horizon,
               "witness": str(self.verdict.witness) if self.verdict.witness else None,
               "verdict": self.verdict.to_dict()}
        if timings and self.duration is not None:
            out["duration_s"] = round(self.duration, 4)
        return out


@dataclass
class Report:
    suite: str
    config: Config
    records: list[Record] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        counts = {"total": len(self.records), CERTIFIED: 0, HORIZON: 0, FAIL: 0}
        for r in self.records:
            counts[r.verdict.status] += 1
        counts["fail"] = counts.pop(FAIL)
        return counts

    @property
    def passed(self) -> bool:
        return all(r.verdict.passed for r in self.records)

    def missing_anchors(self) -> list[str]:
        seen = {r.anchor for r in self.records}
        return [a for a in PAPER_MAP[self.suite] if a not in seen]


# check builders ---------------------------------------------------------------------

def _systems(table: ObjectTable) -> dict[str, ls.LevelSystem]:
    return table.systems


def _complexes(table: ObjectTable) -> dict[str, ChainComplex]:
    return table.complexes


def idempotent_checks(cfg: Config, table: ObjectTable) -> list[Check]:
    ring, N = cfg.ring, cfg.horizon
    mods = list(_systems(table).values())
    td = loc.tilde(ring)
    return [
        Check("idempotent.tilde-mult", A_TILDE_MULT,
              lambda: cx.is_quasi_iso(loc.tilde_multiplication(ring), N)),
        Check("idempotent.builtin-j", A_SMITH,
              lambda: ar.is_homotopically_idempotent(ar.builtin_smith_ideal(ring), N)),
        Check("idempotent.flatness-corpus", A_FLAT,
              lambda: ar.flatness_check([td.It], mods, N)),
        Check("idempotent.zero-ideal", A_ZERO_IDEAL,
              lambda: ar.is_homotopically_idempotent(ar.zero_smith_ideal(ring), N)),
        Check("idempotent.control-x^(1/2)", A_NEG_SCALAR,
              lambda: expect_fail(ar.is_homotopically_idempotent(
                  ar.scalar_smith_ideal(ring, 1, 1), N), "x^(1/2) idempotent", N)),
    ]


def lemma_bar_checks(cfg: Config, table: ObjectTable) -> list[Check]:
    ring, N = cfg.ring, cfg.horizon
    It = loc.tilde(ring).It
    out = []
    for name, S in _systems(table).items():
        out.append(Check(f"lemma-bar.system.{name}", A_BAR_SYS,
                         (lambda S: lambda: agree("almost zero", ls.is_almost_zero(S, N),
                                                  "I~(x)M zero", ls.is_zero(ls.sys_tensor(It, S), N),
                                                  N, S.name))(S)))
    for name, C in _complexes(table).items():
        out.append(Check(f"lemma-bar.complex.{name}", A_BAR_CX,
                         (lambda C: lambda: agree("homology almost zero",
                                                  cx.homology_almost_zero_all(C, N),
                                                  "I~(x)C contractible",
                                                  cx.is_contractible(cx.tilde_tensor(C), N),
                                                  N, C.name))(C)))
    out.append(Check("lemma-bar.control-V/(x^(1/2))", A_NEG_AZ,
                     lambda: expect_fail(ls.is_almost_zero(ls.cyclic_quotient(ring, "1/2"), N),
                                         "V/(x^(1/2)) almost zero", N)))
    return out


def theorem_a_checks(cfg: Config, table: ObjectTable) -> list[Check]:
    N = cfg.horizon
    cxs = _complexes(table)
    out = [Check(f"theorem-a.triangle.{name}", A_TRIANGLE,
                 (lambda C: lambda: loc.check_theorem_a(C, N))(C)) for name, C in cxs.items()]
    V = cx.unit_complex(cfg.ring)
    for name in sorted(cxs)[:3]:
        out.append(Check(f"theorem-a.lax.V,{name}", A_LAX,
                         (lambda C: lambda: loc.check_lax_monoidal(V, C, N))(cxs[name])))
    return out


def theorem_b_checks(cfg: Config, table: ObjectTable) -> list[Check]:
    corpus = list(_complexes(table).values())
    return [Check("theorem-b.roundtrip", A_ROUNDTRIP,
                  lambda: loc.theorem_b_roundtrip(cfg.ring, cfg.horizon, corpus))]


def arrow_pairs(table: ObjectTable, seed: int, count: int = ARROW_PAIRS) -> list[tuple[str, str]]:
    names = sorted(table.arrows)
    rng = random.Random(seed)
    return [(rng.choice(names), rng.choice(names)) for _ in range(count)] if names else []


def cok_monoidal_checks(cfg: Config, table: ObjectTable) -> list[Check]:
    N = cfg.horizon
    V = cx.unit_complex(cfg.ring)
    out = [Check("cok-monoidal.cok-u0", A_COK_U0, lambda: ar.cok_u0_comparison(V).is_weq(N)),
           Check("cok-monoidal.ker-l0", A_KER_L0, lambda: ar.ker_l0_check(V, N))]
    arrows = {n: ar.arrow(f, n) for n, f in table.arrows.items()}
    for i, (a, b) in enumerate(arrow_pairs(table, cfg.seed)):
        out.append(Check(f"cok-monoidal.box.{i:02d}.{a},{b}", A_COK_BOX,
                         (lambda f, g: lambda: ar.check_cok_monoidal(f, g, N))(arrows[a], arrows[b])))
    for n, f in arrows.items():
        out.append(Check(f"cok-monoidal.stable.{n}", A_KER_COK,
                         (lambda f: lambda: combine(
                             [("ker o cok", ar.ker_cok_comparison(f).is_weq(N)),
                              ("cok o ker", ar.cok_ker_comparison(f).is_weq(N))],
                             f"stability on {f.name}", N))(f)))
    return out


def monoid_corpus(cfg: Config, table: ObjectTable) -> dict[str, mo.MonoidObject]:
    out = dict(mo.builtin_monoids(cfg.ring))
    for n, A in table.monoids.items():
        out[f"corpus:{n}"] = A
    return out


def _shriek_weq(A: mo.MonoidObject, N: int) -> Verdict:
    return cx.is_almost_weq(mo.shriek_shriek(A).comparison, N)


def shriek_checks(cfg: Config, table: ObjectTable) -> list[Check]:
    N = cfg.horizon
    out = []
    for name, A in monoid_corpus(cfg, table).items():
        def bind(A=A):
            return {
                "monoid": (A_MONOID, lambda: mo.verify_monoid(A, N)),
                "shriek-monoid": (A_SHRIEK_MONOID,
                                  lambda: mo.verify_monoid(mo.shriek_shriek(A).monoid, N)),
                "shriek-weq": (A_SHRIEK_WEQ, lambda: _shriek_weq(A, N)),
                "shriek-idem": (A_SHRIEK_IDEM, lambda: mo.verify_shriek_idempotent(A, N)),
                "closed": (A_CLOSED, lambda: mo.verify_closed_monoid(mo.closed_monoid(A, N))),
            }
        for key, (anchor, fn) in bind().items():
            out.append(Check(f"shriek.{key}.{name}", anchor, fn))
        if mo.is_termwise_flat(A.carrier):
            out.append(Check(f"shriek.tensor.{name}", A_SHRIEK_TENSOR,
                             (lambda A: lambda: mo.shriek_tensor_check(A, N))(A)))
    V = mo.unit_monoid(cfg.ring)
    out.append(Check("shriek.control-2mu", A_NEG_2MU,
                     lambda: expect_fail(mo.verify_monoid(V.scaled(2), N), "2mu monoid", N)))
    return out


def quillen_checks(cfg: Config, table: ObjectTable) -> list[Check]:
    out = [Check("quillen.count", A_COUNT, lambda: qu.count_check(cfg.max_n))]
    for n in QUILLEN_RINGS:
        R = qu.FiniteRing.zn(n)
        out.append(Check(f"quillen.split.Z{n:02d}", A_SPLIT,
                         (lambda R: lambda: qu.splitting_battery_check(R, seed=cfg.seed))(R)))
        out.append(Check(f"quillen.serre.Z{n:02d}", A_SERRE,
                         (lambda R: lambda: qu.serre_correspondence_report(R).verdict())(R)))
    return out


BUILDERS = {
    "idempotent": idempotent_checks,
    "lemma-bar": lemma_bar_checks,
    "theorem-a": theorem_a_checks,
    "theorem-b": theorem_b_checks,
    "cok-monoidal": cok_monoidal_checks,
    "shriek": shriek_checks,
    "quillen": quillen_checks,
}


def checks_for(suite: str, cfg: Config, table: ObjectTable) -> list[Check]:
    names = SUITES if suite == "all" else (suite,)
    out = []
    for s in names:
        out.extend(BUILDERS[s](cfg, table))
    ids = [c.id for c in out]
    if len(set(ids)) != len(ids):
        raise AssertionError("duplicate check ids")
    return out


def _timed(check: Check, cap: int) -> Record:
    t0 = time.perf_counter()
    with limits(cap):
        v = check.run()
    return Record(check.id, check.anchor, v, time.perf_counter() - t0)


def run_suite(suite: str, cfg: Config, table: ObjectTable) -> Report:
    if suite not in BUILDERS and suite != "all":
        raise KeyError(suite)
    checks = checks_for(suite, cfg, table)
    # no system may be evaluated past the horizon
    cap = cfg.horizon
    if cfg.jobs <= 1:
        records = [_timed(c, cap) for c in checks]
    else:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            futs = [pool.submit(contextvars.copy_context().run, _timed, c, cap) for c in checks]
            records = [f.result() for f in futs]
    records.sort(key=lambda r: r.id)
    return Report(suite, cfg, records)
