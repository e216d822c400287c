"""Level modules: invariants checked against closed-form counts."""

import pytest

from almostctl import modules as lm
from almostctl.errors import UsageError
from almostctl.matrix import Mat
from almostctl.poly import Poly


def yk(ring, k):
    return Poly.monomial(ring.field, k)


def cyc(ring, level, k):
    return lm.cyclic(ring, level, yk(ring, k))


def test_free_and_zero(ring):
    assert lm.free(ring, 2, 3).gens == 3
    assert lm.zero_module(ring, 2).is_zero()
    assert cyc(ring, 1, 0).is_zero()


def test_k_dim_domain(domain):
    assert cyc(domain, 3, 5).k_dim() == 5
    assert lm.free(domain, 3).k_dim() is None
    assert lm.free(domain, 3).free_rank == 1


def test_k_dim_truncated(trunc):
    # A_3 = k[y]/(y^8)
    assert lm.free(trunc, 3).k_dim() == 8
    assert cyc(trunc, 3, 5).k_dim() == 5
    assert cyc(trunc, 3, 20).k_dim() == 8


@pytest.mark.parametrize("a,b", [(1, 1), (2, 5), (4, 3), (7, 7)])
def test_tor1_domain(domain, a, b):
    # Tor_1(k[y]/y^a, k[y]/y^b) = k[y]/y^min(a,b)
    T = lm.tor1(cyc(domain, 3, a), cyc(domain, 3, b))
    assert T.k_dim() == min(a, b)


@pytest.mark.parametrize("a,b", [(1, 1), (2, 5), (4, 6), (7, 7), (8, 3), (0, 3)])
def test_tor1_truncated(trunc, a, b):
    # over A = k[y]/y^B: Tor_1(A/y^a, A/y^b) = ann(y^a)/y^(B-a), so
    # dim = min(a,b) - max(a+b-B, 0)
    B = 8
    T = lm.tor1(cyc(trunc, 3, a), cyc(trunc, 3, b))
    assert T.k_dim() == min(a, b) - max(a + b - B, 0)


def test_tor1_free_vanishes(ring):
    assert lm.tor1(lm.free(ring, 2), cyc(ring, 2, 1)).is_zero()


@pytest.mark.parametrize("a,b", [(1, 3), (4, 2), (3, 3)])
def test_hom_dim(domain, a, b):
    H = lm.hom(cyc(domain, 2, a), cyc(domain, 2, b))
    assert H.module.k_dim() == min(a, b)


def test_tensor_of_cyclics(ring):
    T = lm.tensor(cyc(ring, 3, 2), cyc(ring, 3, 5))
    assert T.k_dim() == 2


def test_kernel_cokernel_of_multiplication(domain):
    A = lm.free(domain, 1)
    f = lm.ModuleMap(A, A, Mat.from_rows(domain.field, [[yk(domain, 3)]]))
    K, _ = lm.kernel(f)
    C, _ = lm.cokernel(f)
    assert K.is_zero()
    assert C.k_dim() == 3


def test_kernel_truncated(trunc):
    A = lm.free(trunc, 2)  # k[y]/y^4
    f = lm.ModuleMap(A, A, Mat.from_rows(trunc.field, [[yk(trunc, 3)]]))
    K, _ = lm.kernel(f)
    assert K.k_dim() == 3  # ann(y^3) = (y)


def test_homology_exact(domain):
    A = lm.free(domain, 1)
    d = lm.ModuleMap(A, A, Mat.from_rows(domain.field, [[yk(domain, 2)]]))
    H = lm.homology(d, None, A)
    assert H.module.k_dim() == 2


def test_base_change_doubles(domain):
    M = cyc(domain, 2, 3)
    assert lm.base_change(M).k_dim() == 6
    assert lm.base_change(M).level == 3
    with pytest.raises(UsageError):
        lm.base_change(M, 5)


def test_map_check_rejects_bad_matrix(domain):
    A = lm.free(domain, 1)
    Q = cyc(domain, 1, 2)
    # A/(y^2) -> A by 1 does not respect relations
    with pytest.raises(UsageError):
        lm.ModuleMap(Q, A, Mat.identity(domain.field, 1))


def test_isomorphic_after_change_of_presentation(domain):
    F = domain.field
    M = lm.LevelModule(domain, 1, 2, Mat.from_rows(F, [[yk(domain, 1), yk(domain, 1)],
                                                      [Poly.zero(F), yk(domain, 2)]]))
    N = lm.direct_sum([cyc(domain, 1, 1), cyc(domain, 1, 2)])
    assert lm.isomorphic(M, N)
