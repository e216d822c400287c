"""Three-valued verdicts returned by every homotopical predicate."""

from __future__ import annotations

from dataclasses import dataclass, field

CERTIFIED = "certified-pass"
HORIZON = "pass-up-to-horizon"
FAIL = "fail"

_RANK = {FAIL: 0, HORIZON: 1, CERTIFIED: 2}


@dataclass(frozen=True)
class Witness:
    level: int | None
    description: str

    def to_dict(self) -> dict:
        return {"level": self.level, "description": self.description}

    def __str__(self) -> str:
        return self.description if self.level is None else f"level {self.level}: {self.description}"


@dataclass(frozen=True)
class Verdict:
    status: str
    horizon: int | None = None
    witness: Witness | None = None
    detail: str = ""
    subs: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.status not in _RANK:
            raise ValueError(f"unknown verdict status {self.status!r}")
        if self.status == FAIL and self.witness is None:
            raise ValueError("a failing verdict needs a witness")

    @classmethod
    def certified(cls, detail: str = "", horizon: int | None = None) -> "Verdict":
        return cls(CERTIFIED, horizon, None, detail)

    @classmethod
    def up_to(cls, horizon: int, detail: str = "") -> "Verdict":
        return cls(HORIZON, horizon, None, detail)

    @classmethod
    def fail(cls, witness: Witness, horizon: int | None = None, detail: str = "") -> "Verdict":
        return cls(FAIL, horizon, witness, detail)

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    @property
    def certified_pass(self) -> bool:
        return self.status == CERTIFIED

    def __bool__(self) -> bool:
        return self.passed

    def with_detail(self, detail: str) -> "Verdict":
        return Verdict(self.status, self.horizon, self.witness, detail, self.subs)

    def label(self) -> str:
        if self.status == HORIZON:
            return f"{HORIZON}({self.horizon})"
        return self.status

    def to_dict(self) -> dict:
        out = {"status": self.status, "horizon": self.horizon,
               "witness": self.witness.to_dict() if self.witness else None}
        if self.detail:
            out["detail"] = self.detail
        if self.subs:
            out["subchecks"] = [{"name": n, **v.to_dict()} for n, v in self.subs]
        return out

    def __str__(self) -> str:
        s = self.label()
        if self.witness:
            s += f" [{self.witness}]"
        return s


def combine(parts, detail: str = "", horizon: int | None = None) -> Verdict:
    """Weakest status wins; ``parts`` is a list of Verdicts or (name, Verdict) pairs."""
    named = [p if isinstance(p, tuple) else (f"part{i}", p) for i, p in enumerate(parts)]
    if not named:
        return Verdict.certified(detail, horizon)
    worst = min(named, key=lambda nv: _RANK[nv[1].status])
    v = worst[1]
    hs = [p.horizon for _, p in named if p.horizon is not None]
    h = horizon if horizon is not None else (max(hs) if hs else None)
    witness = None
    if v.status == FAIL:
        witness = Witness(v.witness.level, f"{worst[0]}: {v.witness.description}")
    return Verdict(v.status, h, witness, detail, tuple(named))


def agree(name_a: str, a: Verdict, name_b: str, b: Verdict, horizon: int | None = None,
          detail: str = "") -> Verdict:
    """Pass when two verdicts agree on pass/fail (a biconditional check)."""
    h = horizon if horizon is not None else (a.horizon or b.horizon)
    subs = ((name_a, a), (name_b, b))
    if a.passed == b.passed:
        status = CERTIFIED if (a.certified_pass or not a.passed) and (b.certified_pass or not b.passed) \
            else HORIZON
        return Verdict(status, h, None, detail, subs)
    w = Witness(None, f"{name_a} is {a.label()} but {name_b} is {b.label()}")
    return Verdict(FAIL, h, w, detail, subs)


def both(name_a: str, a: Verdict, name_b: str, b: Verdict, horizon: int | None = None,
         detail: str = "") -> Verdict:
    """One property computed two ways: its status when the routes agree, fail otherwise."""
    if a.passed != b.passed:
        w = Witness(None, f"routes disagree: {name_a} is {a.label()}, {name_b} is {b.label()}")
        return Verdict(FAIL, horizon, w, detail, ((name_a, a), (name_b, b)))
    return combine([(name_a, a), (name_b, b)], detail, horizon)


def expect_fail(v: Verdict, name: str = "check", horizon: int | None = None) -> Verdict:
    """Turn a required failure into a pass that keeps the original witness in its detail."""
    if v.passed:
        return Verdict.fail(Witness(None, f"{name} passed but should fail"), horizon or v.horizon)
    return Verdict(CERTIFIED, horizon or v.horizon, None, f"failed as expected: {v.witness}",
                   ((name, v),))
