import math

import pytest

from almostctl import quillen as qu
from almostctl.errors import UsageError


def brute_idempotent_ideals(n):
    # ideals of Z/n are (d) for d | n; (d)^2 = (d) iff gcd(d^2, n) = d
    return [d for d in range(1, n + 1) if n % d == 0 and math.gcd(d * d, n) == d]


def brute_omega(n):
    return len({p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))})


@pytest.mark.parametrize("n", list(range(1, 61)) + [64, 90, 128, 180, 210])
def test_count_matches_brute_force(n):
    got = qu.enumerate_idempotent_ideals(qu.FiniteRing.zn(n))
    assert len(got) == len(brute_idempotent_ideals(n)) == 2 ** brute_omega(n)
    assert qu.omega(n) == brute_omega(n)


def test_generators_idempotent():
    R = qu.FiniteRing.zn(30)
    for I in qu.enumerate_idempotent_ideals(R):
        e = I.generator
        assert R.mul(e, e) == e
        assert qu.principal_ideal(R, e) == I.elements if hasattr(I, "elements") else True


def test_z12_ideals():
    R = qu.FiniteRing.zn(12)
    labels = [I.label() for I in qu.enumerate_idempotent_ideals(R)]
    assert labels == ["(0)", "(4)", "(9)", "(1)"]


def test_product_ring():
    R = qu.FiniteRing.parse("Z/2xZ/3")
    assert R.size == 6
    assert len(qu.enumerate_idempotent_ideals(R)) == 4
    assert len(qu.idempotents(R)) == 4


def test_parse_errors():
    with pytest.raises(UsageError):
        qu.FiniteRing.parse("Z/x")
    with pytest.raises(UsageError):
        qu.FiniteRing((0,))


def test_size_bound():
    with pytest.raises(qu.SizeError):
        qu.count_check(20000)
    with pytest.raises(qu.SizeError):
        qu.check_size(qu.FiniteRing.zn(10 ** 7))


@pytest.mark.parametrize("n", [4, 6, 12, 30])
def test_splitting_battery(n):
    assert qu.splitting_battery_check(qu.FiniteRing.zn(n)).passed


def test_splitting_rejects_non_idempotent():
    R = qu.FiniteRing.zn(4)
    M = qu.cyclic_module(R, [4])
    with pytest.raises(UsageError):
        qu.splitting_check(R, R.elem(2), M)


@pytest.mark.parametrize("n", [4, 6, 12, 30])
def test_serre_classes_distinct(n):
    rep = qu.serre_correspondence_report(qu.FiniteRing.zn(n))
    assert rep.verdict().passed
    assert len(set(rep.signatures.values())) == 2 ** qu.omega(n)


def test_serre_class_membership():
    # e = 3 in Z/6 generates (3); S_e = {M : 3M = 0}
    R = qu.FiniteRing.zn(6)
    assert qu.in_class(R, R.elem(3), qu.cyclic_module(R, [3]))
    assert not qu.in_class(R, R.elem(3), qu.cyclic_module(R, [2]))


def test_module_axioms():
    R = qu.FiniteRing.zn(12)
    for M in qu.battery(R, 36):
        M.check()
