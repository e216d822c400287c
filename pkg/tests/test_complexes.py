import pytest

from almostctl import complexes as cx
from almostctl import systems as ls
from almostctl.objfile import parse_text
from almostctl.runtime import limits


def dims(C, n):
    out = {}
    for k in C.degrees():
        h = C.homology_module(k, n).module
        out[k] = h.k_dim()
    return out


def koszul2(ring, a, b):
    text = f"""
system V kind constant level 0 gens 1
system V2 kind constant level 0 gens 2
complex K degrees 0..2
  term 2 V
  term 1 V2
  term 0 V
  d 2 [[-x^({b})], [x^({a})]]
  d 1 [[x^({a}), x^({b})]]
end
"""
    return parse_text(text, "<k>", ring).complexes["K"]


def test_corpus_koszul_homology(corpus_domain, cap8):
    # at level 3, x^(1/2) = y^4 and x^(1/4) = y^2
    C = corpus_domain.complexes
    assert dims(C["Kh"], 3) == {0: 4, 1: 0}
    assert dims(C["Kpair"], 3) == {0: 2, 1: 2, 2: 0}
    assert dims(C["Kj"], 3) == {0: 1, 1: 0}
    assert dims(C["Shift"], 3)[-1] is None


@pytest.mark.parametrize("a,b", [("1/2", "1/4"), ("3/4", "1/8"), ("1", "1")])
def test_koszul_two_elements(domain, a, b, cap8):
    # over a PID, H0 = H1 = A/(gcd) and H2 = 0
    from fractions import Fraction
    K = koszul2(domain, a, b)
    n = 3
    g = min(Fraction(a), Fraction(b)) * (1 << n)
    assert dims(K, n) == {0: g, 1: g, 2: 0}


def test_d_squared_zero_on_tensor(corpus_domain, cap8):
    C = corpus_domain.complexes
    T = cx.complex_tensor(C["Kh"], C["Kpair"])
    T.check(4)
    assert set(T.degrees()) == {0, 1, 2, 3}


def test_cone_of_identity_contractible(ring, cap8):
    V = cx.unit_complex(ring)
    idV = cx.ChainMap.identity_of(V)
    assert cx.is_contractible(cx.cone(idV), 8).passed


def test_cone_long_exact_counts(domain, cap8):
    # levelwise multiplication by y_n: H0 at level n is A/(y), H1 = 0
    V = ls.unit_system(domain)
    K = cx.ChainComplex.two_term(ls.action_map(V, 1))
    assert dims(K, 2) == {0: 1, 1: 0}
    assert dims(K, 5) == {0: 1, 1: 0}


def test_quasi_iso_and_failure(corpus_domain, cap8):
    A = corpus_domain.arrows
    assert not cx.is_quasi_iso(A["Kq_Kh"], 8).passed
    assert cx.is_quasi_iso(A["idV"], 8).passed
    assert not cx.is_quasi_iso(A["zV"], 8).passed


def test_almost_weq_j(ring, cap8):
    from almostctl import arrows as ar
    s = ar.builtin_smith_ideal(ring)
    assert cx.is_almost_weq(s.j.f, 8).passed
    assert not cx.is_quasi_iso(s.j.f, 8).passed


def test_shift_moves_homology(corpus_domain, cap8):
    Kh = corpus_domain.complexes["Kh"]
    S = cx.shift(Kh, 2)
    assert dims(S, 3) == {2: 4, 3: 0}


def test_contractible_detects_homology(corpus_domain, cap8):
    v = cx.is_contractible(corpus_domain.complexes["Kh"], 8)
    assert not v.passed
    assert v.witness is not None


def test_almost_zero_homology(corpus_domain, cap8):
    C = corpus_domain.complexes
    assert cx.homology_almost_zero_all(C["Kj"], 8).passed
    assert cx.homology_almost_zero_all(C["VmodIc"], 8).passed
    assert not cx.homology_almost_zero_all(C["Kh"], 8).passed


def test_direct_sum_and_swap(domain, cap8):
    V = cx.unit_complex(domain)
    S = cx.direct_sum([V, V])
    assert S.gens(0, 2) == 2
    sw = cx.swap_map(V, V)
    assert cx.is_quasi_iso(sw, 8).passed
