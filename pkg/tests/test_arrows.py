import pytest

from almostctl import arrows as ar
from almostctl import complexes as cx
from almostctl import modules as lm
from almostctl import systems as ls


def test_builtin_smith_ideal_domain(domain, cap8):
    v = ar.is_homotopically_idempotent(ar.builtin_smith_ideal(domain), 8)
    assert v.passed


def test_builtin_smith_ideal_truncated_fails(trunc, cap8):
    # mu_j fails once x = 0; the witness appears at the first level
    v = ar.is_homotopically_idempotent(ar.builtin_smith_ideal(trunc), 8)
    assert not v.passed
    assert v.witness.level == 1
    assert "mu_j" in str(v.witness)


def test_zero_ideal_idempotent(ring, cap8):
    assert ar.is_homotopically_idempotent(ar.zero_smith_ideal(ring), 8).passed


@pytest.mark.parametrize("power,level", [(1, 1), (1, 2), (3, 2)])
def test_scalar_ideal_not_idempotent(ring, power, level, cap8):
    v = ar.is_homotopically_idempotent(ar.scalar_smith_ideal(ring, power, level), 8)
    assert not v.passed
    assert v.witness is not None


def test_flatness_domain(domain, cap8):
    It, _ = ls.tilde_ideal(domain)
    assert ar.flatness_check([It], ar.default_flatness_modules(domain), 8).passed


def test_flatness_truncated_witness(trunc, cap8):
    # at level 1 over k[y]/(y^2), I~ and V/I are both A/(y) and Tor1(A/(y), A/(y)) = A/(y)
    It, _ = ls.tilde_ideal(trunc)
    v = ar.flatness_check([It], ar.default_flatness_modules(trunc), 8)
    assert not v.passed
    T = lm.tor1(It.member(1), ls.quotient_by_ideal(trunc).member(1))
    assert T.k_dim() == 1


def test_cok_u0_and_ker_l0(ring, cap8):
    V = cx.unit_complex(ring)
    assert ar.cok_u0_comparison(V).is_weq(8).passed
    assert ar.ker_l0_check(V, 8).passed


def test_cok_of_multiplication(domain, corpus_domain, cap8):
    # cok(xh: V -> V) is 0 -> cone(xh), with H0 = V/(x^(1/2))
    f = ar.arrow(corpus_domain.arrows["xh"], "xh")
    c = ar.cok_functor(f)
    h = c.target.homology_module(0, 2).module
    assert h.k_dim() == 2


@pytest.mark.parametrize("a,b", [("j", "j"), ("xh", "xq"), ("diag", "projh"), ("Kq_Kh", "idV")])
def test_cok_monoidal_pairs(corpus_domain, a, b, cap8):
    A = corpus_domain.arrows
    assert ar.check_cok_monoidal(ar.arrow(A[a], a), ar.arrow(A[b], b), 8).passed


@pytest.mark.parametrize("name", ["j", "xh", "zV", "incl21", "Kq_Kh"])
def test_ker_cok_stable(corpus_domain, name, cap8):
    f = ar.arrow(corpus_domain.arrows[name], name)
    assert ar.ker_cok_comparison(f).is_weq(8).passed
    assert ar.cok_ker_comparison(f).is_weq(8).passed


def test_box_product_shape(corpus_domain, cap8):
    A = corpus_domain.arrows
    f, g = ar.arrow(A["xh"], "xh"), ar.arrow(A["xq"], "xq")
    p = ar.pushout_product(f, g)
    p.f.check(4)
    # pushout of V(x)V <- V(x)V -> V(x)V: degree 1 carries the cone term
    assert p.target.gens(0, 2) == 1
    d = ar.diag_tensor(f, g)
    assert d.source.gens(0, 2) == 1


def test_arrow_map_commutes(domain, cap8):
    V = cx.unit_complex(domain)
    m = ar.cok_u0_comparison(V)
    assert m.commutes(8).passed
