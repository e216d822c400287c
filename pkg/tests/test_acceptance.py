"""Acceptance gate: one test per criterion, each printing a pass/fail line."""

import subprocess
import sys
import time

import pytest

from almostctl import arrows as ar
from almostctl import complexes as cx
from almostctl import localization as loc
from almostctl import monoids as mo
from almostctl import systems as ls
from almostctl.corpus import load_corpus
from almostctl.ground import FieldSpec, RingSpec
from almostctl.runtime import limits
from almostctl.suites import Config, run_suite

from conftest import record_criterion

F5 = FieldSpec.fp(5)
VARIANTS = ("domain", "truncated")


def ring_of(variant):
    return RingSpec(variant, F5)


def suite(name, variant, horizon=8, **kw):
    ring = ring_of(variant)
    cfg = Config(ring=ring, horizon=horizon, **kw)
    t0 = time.perf_counter()
    rep = run_suite(name, cfg, load_corpus(ring))
    return rep, time.perf_counter() - t0


def failures(rep):
    return [f"{r.id}: {r.verdict.witness}" for r in rep.records if not r.verdict.passed]


def test_c01_idempotency():
    parts, ok = [], True
    t0 = time.perf_counter()
    for variant in VARIANTS:
        ring = ring_of(variant)
        first_bad = None
        # horizon 0 admits no transitions, so no colimit statement can be tested there
        for N in range(1, 11):
            with limits(N):
                v_mu = cx.is_quasi_iso(loc.tilde_multiplication(ring), N)
                _, mu_j, _ = ar.smith_multiplication(ar.builtin_smith_ideal(ring))
                v_j = mu_j.is_weq(N)
            if first_bad is None and not (v_mu.passed and v_j.passed):
                first_bad = (N, v_mu, v_j)
        if first_bad is None:
            parts.append(f"{variant}: mu and mu_j pass at every horizon 1..10")
        else:
            N, v_mu, v_j = first_bad
            ok = False
            parts.append(f"{variant}: first failure at level {N}: mu {v_mu.label()}, mu_j {v_j}")
    dt = time.perf_counter() - t0
    ok = ok and dt < 10
    record_criterion(1, ok, f"{'; '.join(parts)}; {dt:.1f}s")
    assert ok


def test_c02_flatness():
    ring = ring_of("domain")
    mods = list(load_corpus(ring).systems.values())
    with limits(8):
        v = ar.flatness_check([loc.tilde(ring).It], mods, 8)
    tr = ring_of("truncated")
    with limits(8):
        vt = ar.flatness_check([loc.tilde(tr).It], list(load_corpus(tr).systems.values()), 8)
    ok = v.passed and len(mods) >= 20
    record_criterion(2, ok, f"{len(mods)} corpus systems, domain {v.label()}; "
                            f"truncated (recorded) {vt}")
    assert len(mods) >= 20
    assert v.passed, str(v)


def test_c03_almost_zero_biconditional():
    out, ok = [], True
    for variant in VARIANTS:
        rep, _ = suite("lemma-bar", variant)
        table = load_corpus(ring_of(variant))
        bad = failures(rep)
        ok = ok and not bad and len(table.systems) >= 20 and len(table.complexes) >= 10
        out.append(f"{variant}: {len(rep.records)} checks, {len(bad)} disagreements")
    record_criterion(3, ok, "; ".join(out))
    assert ok


def test_c04_reflection_triangle():
    out, ok = [], True
    for variant in VARIANTS:
        rep, dt = suite("theorem-a", variant)
        bad = failures(rep)
        ok = ok and not bad and dt < 60
        out.append(f"{variant}: {len(rep.records)} checks, {len(bad)} failures, {dt:.1f}s")
    record_criterion(4, ok, "; ".join(out))
    assert ok


def test_c05_cok_ker():
    out, ok = [], True
    for variant in VARIANTS:
        rep, _ = suite("cok-monoidal", variant, seed=0)
        bad = failures(rep)
        boxes = sum(1 for r in rep.records if ".box." in r.id)
        ok = ok and not bad and boxes == 10
        out.append(f"{variant}: {boxes} box pairs, {len(rep.records)} checks, {len(bad)} failures")
    record_criterion(5, ok, "; ".join(out))
    assert ok


def test_c06_shriek():
    out, ok = [], True
    for variant in VARIANTS:
        rep, _ = suite("shriek", variant)
        bad = failures(rep)
        ok = ok and not bad
        out.append(f"{variant}: {len(rep.records)} checks, {len(bad)} failures")
    record_criterion(6, ok, "; ".join(out))
    assert ok


def test_c07_roundtrip():
    rep, _ = suite("theorem-b", "domain")
    v = rep.records[0].verdict
    record_criterion(7, v.passed, f"domain, horizon 8: {v}")
    assert v.passed


def test_c08_quillen():
    rep, dt = suite("quillen", "domain", max_n=200)
    bad = failures(rep)
    ok = not bad and dt < 30
    record_criterion(8, ok, f"{len(rep.records)} checks, {len(bad)} failures, {dt:.1f}s")
    assert ok


def test_c09_negative_controls():
    out, ok = [], True
    for variant in VARIANTS:
        ring = ring_of(variant)
        with limits(8):
            vs = {
                "x^(1/2) arrow": ar.is_homotopically_idempotent(ar.scalar_smith_ideal(ring, 1, 1), 8),
                "V/(x^(1/2))": ls.is_almost_zero(ls.cyclic_quotient(ring, "1/2"), 8),
                "2mu": mo.verify_monoid(mo.unit_monoid(ring).scaled(2), 8),
            }
        for name, v in vs.items():
            good = (not v.passed) and v.witness is not None
            ok = ok and good
            if variant == "domain":
                out.append(f"{name} -> {v.label()} [{v.witness}]")
    record_criterion(9, ok, "; ".join(out))
    assert ok


def _suite_all_json(jobs):
    cmd = [sys.executable, "-m", "almostctl.cli", "suite", "all", "--seed", "12345",
           "--report", "json", "--jobs", str(jobs)]
    return subprocess.run(cmd, capture_output=True, timeout=600)


def test_c10_determinism():
    a = _suite_all_json(1)
    b = _suite_all_json(1)
    c = _suite_all_json(4)
    same = a.stdout == b.stdout == c.stdout and len(a.stdout) > 0
    record_criterion(10, same, f"suite all x3 (jobs 1, 1, 4), {len(a.stdout)} bytes, "
                               f"identical={same}, exit {a.returncode}")
    assert same
