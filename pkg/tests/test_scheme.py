import itertools

import pytest
from hypothesis import given, settings, strategies as st

import oracle
import rosenspec.scheme as S
from rosenspec.errors import BadGluing, MixedSchemes, NeedsBound, NotInvertible
from rosenspec.rings import PolyRing, zmod
from rosenspec.spectrum import NO, UNKNOWN, YES

X2 = S.p1(2)
X2R = S.p1(2, cover="rational")
X3 = S.p1(3)

polys = st.lists(st.integers(0, 2), max_size=3).map(tuple)
rats = st.tuples(polys, polys.filter(lambda f: any(f))).map(lambda a: S.rat(a[0], a[1], 3))


@given(rats, rats, rats)
def test_rational_function_field_laws(a, b, c):
    p = 3
    assert S.r_add(a, b, p) == S.r_add(b, a, p)
    assert S.r_mul(S.r_mul(a, b, p), c, p) == S.r_mul(a, S.r_mul(b, c, p), p)
    assert S.r_mul(a, S.r_add(b, c, p), p) == S.r_add(S.r_mul(a, b, p), S.r_mul(a, c, p), p)
    assert S.r_sub(a, a, p) == S.ZERO
    if a != S.ZERO:
        assert S.r_mul(a, S.r_inv(a, p), p) == S.ONE


@pytest.mark.parametrize("p", [2, 3, 5])
def test_pgl2_size_and_group_law(p):
    invertible = sum(1 for A in itertools.product(range(p), repeat=4) if (A[0] * A[3] - A[1] * A[2]) % p)
    G = S.pgl2(p)
    assert len(G) == invertible // (p - 1)
    for A, B in itertools.islice(itertools.product(G, repeat=2), 200):
        AB = S.mob_mul(A, B, p)
        for x in [S.INF] + list(range(p)):
            assert S.mob_point(AB, x, p) == S.mob_point(A, S.mob_point(B, x, p), p)
        assert S.mob_mul(A, S.mob_inv(A, p), p) == S.mob_norm((1, 0, 0, 1), p)


# ---------------------------------------------------------------------------
# schemes and points


@pytest.mark.parametrize("X", [X2, X3, X2R, S.p1(3, cover="rational")], ids=lambda X: f"{X.label}/{len(X.charts)}")
def test_projective_line_gluing_verified(X):
    assert X.certificates
    assert X.is_integral()
    assert len(X.components) == 1


def test_gluing_descriptors_checked():
    bad = {"kind": "glued", "charts": [{"kind": "poly", "coeff": {"kind": "gf", "q": 2}},
                                       {"kind": "poly", "coeff": {"kind": "gf", "q": 2}, "var": "s"}],
           "gluing": [{"i": 0, "j": 1, "f": [0, 1], "g": [0, 1], "image": [[1], [0, 1]]},
                      {"i": 1, "j": 0, "f": [0, 1], "g": [0, 1], "image": [[1], [0, 1]]}]}
    assert S.build_scheme(bad).certificates
    # t -> 1/s^2 is not inverse to s -> 1/t
    bad["gluing"][0]["image"] = [[1], [0, 0, 1]]
    with pytest.raises(BadGluing):
        S.build_scheme(bad)
    # a one-sided gluing is rejected too
    bad["gluing"] = bad["gluing"][1:]
    with pytest.raises(BadGluing):
        S.build_scheme(bad)


@pytest.mark.parametrize("q,d", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_point_count_of_projective_line(q, d):
    pts = S.points(S.p1(q), d)
    # generic point, closed points of the affine chart up to degree d, and infinity
    want = 1 + sum(oracle.monic_irreducible_count(k, q) for k in range(1, d + 1)) + 1
    assert len(pts) == want
    assert sum(x.is_generic for x in pts) == 1


def test_rational_cover_has_same_points():
    a = sorted(x.label for x in S.points(X2, 2))
    b = S.points(X2R, 2)
    assert len(a) == len(b)


def test_points_need_bound():
    with pytest.raises(NeedsBound):
        S.points(X2)


def test_disjoint_union_components():
    X = S.disjoint_union(S.affine(zmod(4)), S.affine(zmod(3)), X2)
    assert len(X.components) == 3
    assert not X.is_integral()


# ---------------------------------------------------------------------------
# sheaves


@pytest.mark.parametrize("X", [X2, X3, X2R], ids=lambda X: f"{X.label}/{len(X.charts)}")
@pytest.mark.parametrize("n", [-2, -1, 0, 1, 2, 3, 4])
def test_sections_of_twisting_sheaves(X, n):
    s = S.global_sections(S.twist(X, n))
    assert s.dimension == max(n + 1, 0)
    assert s.stable


@settings(max_examples=20)
@given(st.integers(-3, 3), st.integers(-3, 3))
def test_line_bundle_algebra(a, b):
    La, Lb = S.twist(X2, a), S.twist(X2, b)
    assert S.line_degree(S.tensor(La, Lb)) == a + b
    assert S.line_degree(S.dual(La)) == -a
    assert S.line_iso(La, Lb) == (a == b)


def test_sections_of_sums_add():
    M = S.direct_sum(S.twist(X2, 1), S.twist(X2, 2))
    assert S.global_sections(M).dimension == 2 + 3
    T = S.tensor(S.direct_sum(S.structure_sheaf(X2), S.twist(X2, 1)), S.twist(X2, 1))
    assert S.global_sections(T).dimension == 2 + 3


def test_skyscraper_support_is_the_point():
    pts = S.points(X2, 2)
    for x in pts:
        if x.is_generic:
            continue
        supp = S.sheaf_invariants(S.skyscraper(X2, x), "support", window=pts)
        assert [y.label for y in supp] == [x.label]
    O = S.structure_sheaf(X2)
    assert len(S.sheaf_invariants(O, "support", window=pts)) == len(pts)


def test_skyscraper_sections_are_residue_field():
    for x in S.points(X2, 3):
        if not x.is_generic:
            assert S.global_sections(S.skyscraper(X2, x)).dimension == x.degree


def test_torsion_subsheaf():
    pts = S.points(X2, 2)
    x = next(y for y in pts if y.degree == 2)
    M = S.direct_sum(S.skyscraper(X2, x), S.twist(X2, 1))
    T = S.sheaf_invariants(M, "torsion")
    assert S.global_sections(T).dimension == 2
    assert not S.is_torsion_free(M)
    assert S.is_torsion_free(S.twist(X2, -1))


def test_mixed_schemes_rejected():
    with pytest.raises(MixedSchemes):
        S.direct_sum(S.structure_sheaf(X2), S.structure_sheaf(X3))


def test_map_kernel_and_cokernel_on_affine_line():
    X = S.affine(PolyRing(2))
    O = S.structure_sheaf(X)
    f = S.SheafMap(O, O, [[[(0, 1)]]])
    C = S.cokernel(f)
    pts = S.points(X, 2)
    assert [y.label for y in S.sheaf_invariants(C, "support", window=pts)] == ["(t)"]
    assert S.kernel(f).is_zero()


# ---------------------------------------------------------------------------
# the preorder on sheaves


def test_sheaf_preorder_by_support():
    pts = [x for x in S.points(X2, 2) if not x.is_generic]
    O = S.structure_sheaf(X2)
    for x in pts:
        sx = S.skyscraper(X2, x)
        assert S.precedes_sheaf(sx, S.twist(X2, 3)).outcome == YES
        assert S.precedes_sheaf(O, sx).outcome == NO
        for y in pts:
            want = x.label == y.label
            assert (S.precedes_sheaf(sx, S.skyscraper(X2, y)).outcome == YES) == want


def test_line_bundles_are_equivalent():
    O = S.structure_sheaf(X2)
    for n in (-2, 1, 3):
        assert S.equivalent_sheaf(S.twist(X2, n), O) is True


def test_glued_descriptor_without_separation_is_undecided():
    desc = {"kind": "glued", "charts": [{"kind": "poly", "coeff": {"kind": "gf", "q": 2}},
                                        {"kind": "poly", "coeff": {"kind": "gf", "q": 2}, "var": "s"}],
            "gluing": [{"i": 0, "j": 1, "f": [0, 1], "g": [0, 1], "image": [[1], [0, 1]]},
                       {"i": 1, "j": 0, "f": [0, 1], "g": [0, 1], "image": [[1], [0, 1]]}]}
    X = S.build_scheme(desc)
    assert not X.separated
    O = S.structure_sheaf(X)
    pts = S.points(X, 1)
    x = next(y for y in pts if y.label == "(t)")
    assert S.precedes_sheaf(S.skyscraper(X, x), O).outcome == YES
    assert S.precedes_sheaf(O, O).outcome == YES
    M = S.direct_sum(O, S.skyscraper(X, x))
    assert S.precedes_sheaf(M, O).outcome == UNKNOWN
    # the same sheaves on the separated model are decided
    y = next(z for z in S.points(X2, 1) if z.label == "(t)")
    M2 = S.direct_sum(S.structure_sheaf(X2), S.skyscraper(X2, y))
    assert S.precedes_sheaf(M2, S.structure_sheaf(X2)).outcome == YES


# ---------------------------------------------------------------------------
# reconstruction and twists


@pytest.mark.parametrize("X,bound", [(S.affine(zmod(6)), None), (S.empty(), None), (X2, 2),
                                     (S.disjoint_union(S.affine(zmod(4)), S.affine(zmod(3))), None)],
                         ids=["Z/6", "empty", "P1", "union"])
def test_reconstruction_matches(X, bound):
    rep = S.reconstruct_and_compare(X, bound)
    assert rep["matched"] and not rep["mismatches"]


def test_reconstruction_needs_bound():
    with pytest.raises(NeedsBound):
        S.reconstruct_and_compare(X2)


def test_structure_ring_checks():
    assert S.pid_center(PolyRing(2))["ok"]
    assert S.overlap_check(X2, 0, 1)["ok"]


def test_automorphism_counts():
    assert len(S.automorphisms(X2R)) == len(S.pgl2(2))
    # the two-chart cover only sees maps preserving {0, inf}
    assert len(S.automorphisms(X2)) == 2


@pytest.mark.parametrize("n", [-1, 0, 2])
def test_twist_round_trip(n):
    for A in S.pgl2(2)[:3]:
        assert S.twist_round_trip(X2R, A, n)["ok"]


def test_composition_law():
    for A, n, B, m in S.sample_pairs(X2R, count=3, seed=1):
        assert S.composition_check(X2R, A, n, B, m)["ok"]


def test_twist_data_requires_line_bundle():
    f = S.automorphism(X2R, (1, 0, 0, 1))
    with pytest.raises(NotInvertible):
        S.TwistData(f, S.direct_sum(S.structure_sheaf(X2R), S.structure_sheaf(X2R)))


def test_pullback_moves_skyscrapers():
    A = (1, 1, 0, 1)  # t -> t + 1
    f = S.automorphism(X2R, A)
    pts = S.points(X2R, 1)
    by_key = {S._p1_key(X2R, x): x for x in pts}
    moved = S.pullback(S.skyscraper(X2R, by_key[0]), f)
    supp = S.sheaf_invariants(moved, "support", window=pts)
    assert [S._p1_key(X2R, y) for y in supp] == [1]
