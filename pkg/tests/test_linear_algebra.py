from hypothesis import given, strategies as st

import oracle
from rosenspec import howell as H
from rosenspec import poly as P
from rosenspec import smith as S


@st.composite
def zn_rows(draw, max_n=12, max_cols=3, max_rows=4):
    n = draw(st.integers(2, max_n))
    c = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=c, max_size=c), max_size=max_rows))
    return n, c, rows


@given(zn_rows())
def test_howell_span_matches_closure(data):
    n, c, rows = data
    form = H.howell_form(rows, n, c)
    assert set(H.enumerate_span(form, n, c)) == oracle.span(rows, n, c)
    assert H.span_order(form, n) == len(oracle.span(rows, n, c))


@given(zn_rows(), st.randoms(use_true_random=False))
def test_howell_form_is_canonical(data, rnd):
    n, c, rows = data
    # a different generating set of the same subgroup
    extra = []
    for _ in range(3):
        coeffs = [rnd.randrange(n) for _ in rows]
        extra.append([sum(a * r[j] for a, r in zip(coeffs, rows)) % n for j in range(c)])
    shuffled = list(rows) + extra
    rnd.shuffle(shuffled)
    assert H.howell_form(shuffled, n, c) == H.howell_form(rows, n, c)


@given(zn_rows(), st.lists(st.integers(0, 11), min_size=3, max_size=3))
def test_membership_matches_closure(data, v):
    n, c, rows = data
    v = [x % n for x in v[:c]]
    form = H.howell_form(rows, n, c)
    assert H.in_span(v, form, n) == (tuple(v) in oracle.span(rows, n, c))


@given(zn_rows(max_cols=2), zn_rows(max_cols=2))
def test_intersection_matches_closure(a, b):
    n, c, ra = a
    rb = [[x % n for x in (r + [0, 0])[:c]] for r in b[2]]
    got = H.intersect(H.howell_form(ra, n, c), H.howell_form(rb, n, c), n, c)
    want = oracle.span(ra, n, c) & oracle.span(rb, n, c)
    assert set(H.enumerate_span(got, n, c)) == want


@given(zn_rows(max_cols=2, max_rows=3))
def test_kernel_of_matrix(data):
    n, c, rows = data
    # x -> x A for the matrix with the given rows; pairs are (image of e_i, e_i)
    g = len(rows)
    if not g:
        return
    pairs = [(r, [1 if i == j else 0 for j in range(g)]) for i, r in enumerate(rows)]
    K = H.kernel(pairs, n, c, g)
    brute = set()
    import itertools
    for x in itertools.product(range(n), repeat=g):
        if all(sum(a * r[j] for a, r in zip(x, rows)) % n == 0 for j in range(c)):
            brute.add(tuple(x))
    assert set(H.enumerate_span(K, n, g)) == brute


def test_howell_example_z12():
    # (4, 2) has order 6; the Howell basis also contains 2 * (4, 2) = (8, 4) reduced to (0, 6)
    form = H.howell_form([[4, 2]], 12, 2)
    assert H.span_order(form, 12) == 6
    assert H.in_span([0, 6], form, 12)


# ---------------------------------------------------------------------------
# polynomials and Smith form over F_p[t]


polys = st.lists(st.integers(0, 2), max_size=4).map(lambda c: P.trim(c, 3))


@given(polys, polys)
def test_poly_division(f, g):
    if not g:
        return
    q, r = P.divmod_poly(f, g, 3)
    assert P.add(P.mul(q, g, 3), r, 3) == f
    assert P.deg(r) < P.deg(g)


@given(polys, polys)
def test_poly_gcd_bezout(f, g):
    d, u, v = P.xgcd(f, g, 3)
    assert P.add(P.mul(u, f, 3), P.mul(v, g, 3), 3) == d
    if f or g:
        assert P.divides(d, f, 3) and P.divides(d, g, 3)


def test_irreducible_counts_against_sieve():
    for p in (2, 3):
        for d in (1, 2, 3, 4):
            if p ** d > 81:
                continue
            assert len(P.irreducibles(d, p)) == oracle.monic_irreducible_count(d, p)


@given(polys)
def test_factorization_multiplies_back(f):
    if P.deg(f) < 1:
        return
    prod = (f[-1],)
    for g, e in P.factor(f, 3):
        assert P.is_irreducible(g, 3)
        prod = P.mul(prod, P.power(g, e, 3), 3)
    assert prod == f


@given(st.lists(st.lists(polys, min_size=2, max_size=2), min_size=1, max_size=3))
def test_smith_decomposition(A):
    ops = S.poly_ops(3)
    U, D, V, Uinv, Vinv = S.smith(A, 2, ops)
    assert S.matmul(S.matmul(U, A, ops), V, ops, 2) == [list(r) for r in D]
    assert S.matmul(U, Uinv, ops) == S.identity(len(A), ops)
    assert S.matmul(V, Vinv, ops) == S.identity(2, ops)
    diag = S.invariant_factors(A, 2, ops)
    for i in range(len(diag) - 1):
        assert ops.divides(diag[i], diag[i + 1])
    for i, r in enumerate(D):
        for j, x in enumerate(r):
            if i != j:
                assert not x


@given(st.lists(st.lists(polys, min_size=2, max_size=2), min_size=1, max_size=3))
def test_left_kernel_annihilates(A):
    ops = S.poly_ops(3)
    for x in S.left_kernel(A, 2, ops):
        assert all(not c for c in S.matmul([x], A, ops)[0])


def test_smith_over_integers():
    _, D, _, _, _ = S.smith([[2, 4], [6, 8]], 2, S.INTEGERS)
    assert S.diagonal(D, 2, S.INTEGERS) == [2, 4]
