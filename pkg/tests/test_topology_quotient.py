import itertools
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

import oracle
import rosenspec.quotient as Q
from rosenspec.modules import cyclic, direct_sum, free, present_module
from rosenspec.rings import enumerate_ideals_primes, gf, ideal_ops, z4_dual, zmod
from rosenspec.topology import (TopReflSubcat, V_cat, V_ring, affine_homeo_check, build_topology,
                                gabriel_product, ideal_of_t, reflector)


def _ideal(R, a):
    return R.ideal([R.from_int(a)])


@given(st.sampled_from([6, 12, 30, 36]), st.integers(0, 35), st.integers(0, 35))
def test_closed_set_laws(n, a, b):
    R = zmod(n)
    _, primes = enumerate_ideals_primes(R)
    I, J = _ideal(R, a), _ideal(R, b)
    VI = set(V_cat(TopReflSubcat(I), primes))
    VJ = set(V_cat(TopReflSubcat(J), primes))
    assert set(V_cat(TopReflSubcat(ideal_ops(R, "sum", I, J)), primes)) == VI & VJ
    assert set(V_cat(TopReflSubcat(ideal_ops(R, "product", I, J)), primes)) == VI | VJ
    # independent route: ideal containment, and the arithmetic description p | gcd(a, n)
    assert VI == set(V_ring(I, primes))
    want = {_ideal(R, p).label() for p in oracle.prime_divisors(n) if gcd(a, n) % p == 0}
    assert VI == want


@pytest.mark.parametrize("R", [zmod(12), zmod(36), gf(4), z4_dual()], ids=lambda R: R.label)
def test_topology_checks(R):
    top = build_topology(R)
    assert top["ok"]
    assert affine_homeo_check(R)["ok"]


@given(st.sampled_from([4, 6, 12]), st.integers(0, 11), st.integers(1, 2), st.data())
@settings(max_examples=25)
def test_reflector_is_quotient_by_IM(n, a, g, data):
    R = zmod(n)
    rows = data.draw(st.lists(st.lists(st.integers(0, n - 1), min_size=g, max_size=g), max_size=2))
    M = present_module(R, g, [[(x,) for x in r] for r in rows])
    I = _ideal(R, a)
    ref = reflector(TopReflSubcat(I), M)
    assert ref.certificate["minimal"] and ref.certificate["quotient_in_T"]
    a = a % n
    want = oracle.module_size(rows + [[a if i == j else 0 for i in range(g)] for j in range(g)], n, g)
    assert ref.reflection.size == want


def test_ideal_of_t_is_meet_of_annihilators():
    R = zmod(12)
    fam = [cyclic(R, _ideal(R, 4)), cyclic(R, _ideal(R, 6))]
    assert ideal_of_t(fam).basis == _ideal(R, 12).basis
    fam = [cyclic(R, _ideal(R, 2)), cyclic(R, _ideal(R, 4))]
    assert ideal_of_t(fam).basis == _ideal(R, 4).basis


def test_gabriel_product_small():
    R = zmod(12)
    ideals, _ = enumerate_ideals_primes(R)
    fam = [cyclic(R, I) for I in ideals]
    for I, J in itertools.product(ideals, repeat=2):
        prod, suite = gabriel_product(TopReflSubcat(I), TopReflSubcat(J), fam)
        assert prod.ideal.basis == ideal_ops(R, "product", I, J).basis
        assert all(rec["ok"] for rec in suite)


# ---------------------------------------------------------------------------
# quotient categories


def _localized_rows(rows, n, g, U):
    """Presentation of M_U for a Z/n module: kill the complement of the U-primary part."""
    k = 1
    for p in U:
        while n % (k * p) == 0:
            k *= p
    return rows + [[k if i == j else 0 for i in range(g)] for j in range(g)]


@pytest.mark.parametrize("U", [(), (2,), (3,), (2, 3)])
def test_quotient_homs_are_local_homs(U):
    n = 6
    R = zmod(n)
    T = Q.thick_of_open(R, [_ideal(R, p).label() for p in U])
    mods = [(1, []), (1, [[2]]), (1, [[3]]), (2, [[2, 0]])]
    for (gm, rm), (gn, rn) in itertools.product(mods, repeat=2):
        M = present_module(R, gm, [[(x,) for x in r] for r in rm])
        N = present_module(R, gn, [[(x,) for x in r] for r in rn])
        want = oracle.hom_count(_localized_rows(rm, n, gm, U), gm, _localized_rows(rn, n, gn, U), gn, n)
        assert Q.quot_hom(M, N, T).order == want


@pytest.mark.parametrize("n", [6, 12])
def test_thick_subcategories_closed(n):
    R = zmod(n)
    fam = Q.test_family(R, sums=False)
    for U in Q.opens(R):
        assert Q.thickness_report(Q.thick_of_open(R, U), fam)["ok"]


def test_localization_model_on_z6():
    R = zmod(6)
    fam = Q.test_family(R, sums=False)
    for U in Q.opens(R):
        assert Q.localization_model(Q.thick_of_open(R, U), fam)["ok"]


@pytest.mark.parametrize("R", [zmod(6), zmod(8), gf(4)], ids=lambda R: R.label)
def test_center_of_module_category(R):
    C = Q.center_of_category(R)
    assert C.ok and C.order == R.size


@pytest.mark.parametrize("U,order", [((), 1), ((2,), 4), ((3,), 3), ((2, 3), 12)])
def test_center_of_quotient_is_local_ring(U, order):
    R = zmod(12)
    T = Q.thick_of_open(R, [_ideal(R, p).label() for p in U])
    C = Q.center_of_quotient(R, T, Q.test_family(R, sums=False))
    assert C.report["ok"]
    assert C.local_ring.size == order


def test_structure_presheaf_z6():
    sheaf = Q.structure_presheaf(zmod(6), Q.test_family(zmod(6)))
    assert sheaf["ok"] and sheaf["triangle"] and sheaf["gluing"]


def test_open_outside_spectrum_rejected():
    with pytest.raises(ValueError):
        Q.thick_of_open(zmod(6), ["(5)"])


def test_thick_subcategory_membership_by_support():
    R = zmod(6)
    T = Q.thick_of_open(R, ["(2)"])
    assert not T.contains(free(R, 1))
    assert T.contains(cyclic(R, _ideal(R, 3)))
    assert not T.contains(cyclic(R, _ideal(R, 2)))
    assert not T.contains(direct_sum(cyclic(R, _ideal(R, 2)), cyclic(R, _ideal(R, 3))))
