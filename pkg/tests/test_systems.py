import pytest

from almostctl import modules as lm
from almostctl import systems as ls
from almostctl.errors import HorizonError
from almostctl.objfile import parse_text
from almostctl.runtime import limits


def custom(ring, rels, transition):
    text = (f"system S kind custom\n  level * gens 1 rels [[{rels}]]\n"
            f"  transition * [[{transition}]]\nend\n")
    return parse_text(text, "<t>", ring).systems["S"]


def test_birth_levels():
    assert list(ls.birth_levels(0, 8)) == [0, 1, 2, 3, 4]
    assert list(ls.birth_levels(2, 8)) == [2, 3, 4, 5]
    assert list(ls.birth_levels(3, 3)) == [3]
    assert list(ls.birth_levels(5, 2)) == [2]


def test_ideal_members(domain, trunc, cap8):
    I, j = ls.ideal_system(domain)
    assert I.member(3).free_rank == 1
    assert not j.at(3).is_iso()
    It, _ = ls.ideal_system(trunc)
    assert It.member(3).k_dim() == 7


def test_unit_and_zero(ring, cap8):
    assert ls.is_zero(ls.zero_system(ring)).certified_pass
    assert not ls.is_zero(ls.unit_system(ring)).passed
    assert not ls.is_almost_zero(ls.unit_system(ring)).passed


def test_quotient_by_ideal(ring, cap8):
    Q = ls.quotient_by_ideal(ring)
    assert ls.is_almost_zero(Q, 8).passed
    v = ls.is_zero(Q, 8)
    assert not v.passed
    assert v.witness is not None


def test_cyclic_quotient_not_almost_zero(ring, cap8):
    v = ls.is_almost_zero(ls.cyclic_quotient(ring, "1/2"), 8)
    assert not v.passed
    assert "x^(1/" in v.witness.description


@pytest.mark.parametrize("c", range(1, 18))
def test_delayed_death_matches_window(domain, c):
    # members k[y_n]/(y_n^c); the transition y is in level n+1 coordinates,
    # so the generator born at m reaches level N as y_N^(2^(N-m) - 1)
    N = 5
    with limits(N):
        S = custom(domain, f"u^{c}", "u")
        born = ls.birth_levels(0, N)
        assert ls.is_zero(S, N).passed == all((1 << (N - m)) - 1 >= c for m in born)
        almost = all((1 << (N - m + 1)) - 1 >= c for m in born)
        assert ls.is_almost_zero(S, N).passed == almost


def test_firm(ring, cap8):
    if not ring.truncated:
        I, _ = ls.ideal_system(ring)
        assert ls.is_firm(I, 8).passed
    assert not ls.is_firm(ls.unit_system(ring), 8).passed
    It, _ = ls.tilde_ideal(ring)
    assert ls.is_firm(It, 8).passed


def test_ideal_not_firm_truncated(trunc, cap8):
    # I (x) I -> I has a kernel once x = 0
    I, _ = ls.ideal_system(trunc)
    v = ls.is_firm(I, 8)
    assert not v.passed
    assert "kernel" in v.witness.description


def test_closed_zero_system(ring, cap8):
    assert ls.is_closed(ls.zero_system(ring), 8).certified_pass


def test_horizon_cap(domain):
    I, _ = ls.ideal_system(domain)
    with limits(4):
        I.member(4)
        with pytest.raises(HorizonError):
            I.member(5)


def test_sum_and_tensor_ranks(domain, cap8):
    I, _ = ls.ideal_system(domain)
    V = ls.unit_system(domain)
    S = ls.sys_sum([I, V, V])
    assert S.member(3).gens == 3
    T = ls.sys_tensor(I, S)
    assert T.member(3).gens == 3


def test_push_composes(domain, cap8):
    I, _ = ls.ideal_system(domain)
    # three transitions y, in coordinates of levels 2, 3, 4
    p = I.push_matrix(1, 4)
    assert p.rows[0][0].degree == 4 + 2 + 1


def test_hom_tower_stabilizes_for_constant(domain, cap8):
    V = ls.unit_system(domain)
    T = ls.sys_hom_from(V, V, 4)
    assert T.stage(2).module.free_rank == 1
    assert T.stabilization() == 0


def test_kernel_of_multiplication(trunc, cap8):
    V = ls.unit_system(trunc)
    f = ls.action_map(V, 1)
    K, _ = ls.sys_kernel(f)
    assert K.member(2).k_dim() == 1
    assert lm.cokernel(f.at(2))[0].k_dim() == 1
