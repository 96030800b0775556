import itertools

import pytest
from hypothesis import given, strategies as st

import oracle
from rosenspec.errors import BadModulus, IllDefined, MixedRings, TooLarge
from rosenspec.modules import (ModuleHom, all_submodules, annihilator, direct_sum, free, hom_group,
                               ideal_times_module, is_isomorphic, present_module, support)
from rosenspec.rings import (all_ideals, enumerate_ideals_primes, gf, ideal_ops, make_ring, parse_shorthand,
                             product_ring, z4_dual, zmod)

SMALL_RINGS = [zmod(4), zmod(6), zmod(12), gf(4), gf(8), z4_dual(), product_ring([zmod(2), zmod(3)])]


@pytest.mark.parametrize("R", SMALL_RINGS, ids=lambda R: R.label)
def test_ring_axioms_exhaustive(R):
    els = list(R.elements())
    for a, b in itertools.product(els, repeat=2):
        assert R.mul(a, b) == R.mul(b, a)
        assert R.mul(R.one, a) == a
    sample = els[:12]
    for a, b, c in itertools.product(sample, repeat=3):
        assert R.mul(R.mul(a, b), c) == R.mul(a, R.mul(b, c))
        assert R.mul(a, R.add(b, c)) == R.add(R.mul(a, b), R.mul(a, c))


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9])
def test_finite_fields_are_fields(q):
    F = gf(q)
    assert F.size == q
    assert F.is_domain
    for a in F.elements():
        if a != F.zero:
            assert any(F.mul(a, b) == F.one for b in F.elements())


@pytest.mark.parametrize("n", [2, 4, 6, 8, 12, 30, 36])
def test_ideals_and_primes_of_zmod(n):
    R = zmod(n)
    ideals, primes = enumerate_ideals_primes(R)
    assert len(ideals) == len(oracle.divisors(n))
    want = sorted(R.ideal([R.from_int(p)]).label() for p in oracle.prime_divisors(n))
    assert sorted(q.label() for q in primes) == want


def _elems(I):
    return {a[0] for a in I.elements()}


@given(st.integers(2, 36), st.integers(0, 35), st.integers(0, 35), st.integers(0, 35))
def test_ideal_operations_match_sets(n, a, b, r):
    R = zmod(n)
    I, J = R.ideal([R.from_int(a)]), R.ideal([R.from_int(b)])
    si, sj = {a * k % n for k in range(n)}, {b * k % n for k in range(n)}
    assert _elems(ideal_ops(R, "sum", I, J)) == {(x + y) % n for x in si for y in sj}
    assert _elems(ideal_ops(R, "intersect", I, J)) == si & sj
    prod = oracle.span([[x * y % n] for x in si for y in sj], n, 1)
    assert _elems(ideal_ops(R, "product", I, J)) == {v[0] for v in prod}
    assert _elems(ideal_ops(R, "colon", I, R.from_int(r))) == {x for x in range(n) if x * r % n in si}


def test_make_ring_descriptors():
    assert make_ring({"kind": "zmod", "n": 12}).size == 12
    assert make_ring({"kind": "gf", "q": 9}).size == 9
    assert make_ring({"kind": "product", "factors": [{"kind": "zmod", "n": 2}, {"kind": "gf", "q": 4}]}).size == 8
    Q = make_ring({"kind": "quotient", "base": {"kind": "poly", "coeff": {"kind": "gf", "q": 2}},
                   "ideal": [[0, 0, 1]]})
    assert Q.size == 4 and not Q.is_domain
    assert parse_shorthand("z4x2").size == 16
    assert parse_shorthand("poly:gf:3:t").p == 3


@pytest.mark.parametrize("text", ["zmod:x", "foo:3", "gf:", "poly"])
def test_bad_shorthand(text):
    with pytest.raises(ValueError):
        parse_shorthand(text)


def test_bad_inputs():
    with pytest.raises(BadModulus):
        zmod(0)
    with pytest.raises(BadModulus):
        gf(6)
    with pytest.raises(BadModulus):
        make_ring({"kind": "poly", "coeff": {"kind": "zmod", "n": 4}})
    with pytest.raises(TooLarge):
        present_module(zmod(12), 6)
    with pytest.raises(MixedRings):
        direct_sum(free(zmod(4), 1), free(zmod(6), 1))


# ---------------------------------------------------------------------------
# modules over Z/n against brute force


@st.composite
def zn_module(draw, n=None, max_g=2):
    n = n or draw(st.sampled_from([2, 4, 6, 8, 12]))
    g = draw(st.integers(1, max_g))
    rows = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=g, max_size=g), max_size=3))
    return n, g, rows


def build(n, g, rows):
    R = zmod(n)
    return present_module(R, g, [[(a,) for a in r] for r in rows])


@given(zn_module())
def test_module_size_and_annihilator(data):
    n, g, rows = data
    M = build(n, g, rows)
    assert M.size == oracle.module_size(rows, n, g)
    assert _elems(annihilator(M)) == oracle.annihilator(rows, n, g)


@given(zn_module())
def test_support_matches_primary_parts(data):
    n, g, rows = data
    M = build(n, g, rows)
    _, primes = enumerate_ideals_primes(M.ring)
    got = {q.label() for q in support(M, primes)}
    R = M.ring
    want = {R.ideal([R.from_int(p)]).label() for p in oracle.prime_divisors(n) if oracle.in_support(rows, n, g, p)}
    assert got == want


@given(zn_module(n=12), zn_module(n=12))
def test_hom_group_order(a, b):
    M, N = build(*a), build(*b)
    assert hom_group(M, N).order == oracle.hom_count(a[2], a[1], b[2], b[1], 12)


@given(zn_module(n=12), zn_module(n=12))
def test_isomorphism_matches_group_type(a, b):
    M, N = build(*a), build(*b)
    same = oracle.group_type(a[2], 12, a[1]) == oracle.group_type(b[2], 12, b[1])
    assert is_isomorphic(M, N) == same


@given(zn_module(n=6), zn_module(n=6), st.data())
def test_exactness_of_kernel_image_cokernel(a, b, data):
    M, N = build(*a), build(*b)
    homs = hom_group(M, N).elements()
    f = homs[data.draw(st.integers(0, len(homs) - 1))]
    K, I = f.kernel(), f.image()
    assert K.size * I.size == M.size
    assert f.cokernel().size * I.size == N.size
    assert f.is_injective() == (K.size == 1)
    assert f.is_surjective() == (I.size == N.size)


@given(zn_module(n=4), zn_module(n=4))
def test_direct_sum_is_biproduct(a, b):
    M, N = build(*a), build(*b)
    S = direct_sum(M, N)
    assert S.size == M.size * N.size
    assert _elems(annihilator(S)) == _elems(annihilator(M)) & _elems(annihilator(N))


def test_ill_defined_hom_rejected():
    R = zmod(4)
    M = present_module(R, 1, [[(2,)]])
    with pytest.raises(IllDefined):
        ModuleHom(M, free(R, 1), [((1,),)])


def test_submodule_lattice_of_z12():
    R = zmod(12)
    subs = all_submodules(free(R, 1))
    assert len(subs) == len(oracle.divisors(12))
    I = R.ideal([R.from_int(4)])
    assert ideal_times_module(I, free(R, 1)).size == 3


@pytest.mark.parametrize("R", [gf(4), z4_dual()], ids=lambda R: R.label)
def test_ideals_by_brute_force(R):
    """Ideals are exactly the additive subgroups closed under multiplication."""
    els = list(R.elements())
    found = {frozenset(I.elements()) for I in all_ideals(R)}
    for I in found:
        assert all(R.mul(r, x) in I for r in els for x in I)
        assert all(R.add(x, y) in I for x in I for y in I)
    # every principal ideal appears
    for a in els:
        assert frozenset(R.mul(a, r) for r in els) in found
