"""Polynomial arithmetic and Smith normal form over F_5[y]."""

import pytest

from almostctl.errors import UsageError
from almostctl.ground import FieldSpec, RingSpec
from almostctl.matrix import Mat, kernel_basis, kron, smith_normal_form, solve
from almostctl.poly import Poly, gcd

F = FieldSpec.fp(5)


def P(*coeffs):
    return Poly.from_terms(F, list(enumerate(coeffs)))


def monic(p):
    return p.monic()[0] if p else p


def test_divmod_identity():
    a, b = P(1, 2, 0, 4, 1), P(3, 0, 1)
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.degree < b.degree


def test_gcd_known():
    # (y-1)(y-2) and (y-1)(y+1)
    a = P(-1, 1) * P(-2, 1)
    b = P(-1, 1) * P(1, 1)
    assert monic(gcd(a, b)) == P(-1, 1)


def test_truncate_and_substitute():
    p = P(1, 1, 1, 1)
    assert p.truncate(2) == P(1, 1)
    assert p.substitute_power(2) == P(1, 0, 1, 0, 1, 0, 1)


def _minor2(m):
    r = m.rows
    return r[0][0] * r[1][1] - r[0][1] * r[1][0]


@pytest.mark.parametrize("rows", [
    [[P(0, 1), P(0, 0, 1)], [P(0, 0, 1), P(0, 1)]],
    [[P(2), P(4)], [P(1), P(2)]],
    [[P(0, 0, 1), P(0)], [P(0), P(0, 1)]],
    [[P(1, 1), P(0, 1)], [P(0, 1), P(-1, 1)]],
])
def test_snf_matches_determinantal_divisors(rows):
    # d1 = gcd of entries, d1*d2 = det up to a unit
    a = Mat.from_rows(F, rows)
    s = smith_normal_form(a)
    assert s.U @ a @ s.W == s.D
    d1, d2 = s.diagonal
    g = gcd(gcd(rows[0][0], rows[0][1]), gcd(rows[1][0], rows[1][1]))
    assert monic(d1) == monic(g)
    assert monic(d1 * d2) == monic(_minor2(a))
    if d2:
        assert d1.divides(d2)


def test_snf_inverse_and_rank():
    a = Mat.from_rows(F, [[P(0, 1), P(0, 1)], [P(0, 1), P(0, 1)]])
    s = smith_normal_form(a)
    assert s.rank == 1
    assert s.U @ s.Uinv == Mat.identity(F, 2)


def test_snf_refuses_truncated():
    with pytest.raises(UsageError):
        smith_normal_form(Mat.identity(F, 1), RingSpec("truncated"))


def test_kernel_and_solve():
    a = Mat.from_rows(F, [[P(0, 1), P(0, 0, 1)]])
    k = kernel_basis(a)
    assert k.shape == (2, 1)
    assert (a @ k).is_zero()
    b = Mat.from_rows(F, [[P(0, 0, 0, 1)]])
    x = solve(a, b)
    assert a @ x == b
    assert solve(a, Mat.from_rows(F, [[P(1)]])) is None


def test_kron_shape_and_entries():
    a = Mat.from_ints(F, [[1, 2]])
    b = Mat.from_ints(F, [[3], [4]])
    k = kron(a, b)
    assert k.shape == (2, 2)
    assert k == Mat.from_ints(F, [[3, 6], [4, 8]])
