import itertools

import pytest
from hypothesis import given, settings, strategies as st

import oracle
from rosenspec.errors import NotPid, ZeroModule
from rosenspec.modules import all_submodules, annihilator, cyclic, direct_sum, free, present_module, zero_module
from rosenspec.pidmod import PidModule
from rosenspec.rings import PolyRing, enumerate_ideals_primes, gf, z4_dual, zmod
from rosenspec.spectrum import (NO, UNKNOWN, YES, equivalent, is_spectral, pid_family, precedes, precedes_pid,
                                replay_certificate, replay_colon, replay_pid, replay_witness, search_precedes,
                                search_precedes_pid, spec_points)


@st.composite
def small_module(draw, n):
    g = draw(st.integers(1, 2))
    rows = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=g, max_size=g), max_size=2))
    if oracle.module_size(rows, n, g) > 8:
        rows = rows + [[2 if i == 0 else 0 for i in range(g)], [0] * (g - 1) + [2]]
    return g, rows


def build(n, g, rows):
    return present_module(zmod(n), g, [[(a,) for a in r] for r in rows])


def _replays(M, N, v):
    if v.outcome == YES:
        return replay_witness(M, N, v.witness) if v.witness and "homs" in v.witness else True
    if v.outcome == NO:
        return replay_certificate(M, N, v.certificate)
    return True


@settings(max_examples=20)
@given(st.sampled_from([4, 6, 8]), st.data())
def test_precedes_matches_subgroup_oracle(n, data):
    gm, rm = data.draw(small_module(n))
    gn, rn = data.draw(small_module(n))
    M, N = build(n, gm, rm), build(n, gn, rn)
    v = precedes(M, N)
    assert v.outcome != UNKNOWN
    # M needs at most gm cyclic factors, so gm copies of N suffice for an embedding
    want = M.size == 1 or oracle.embeds(rm, gm, rn, gn, n, gm)
    assert (v.outcome == YES) == want
    assert _replays(M, N, v)


@settings(max_examples=25)
@given(st.data())
def test_search_agrees_with_annihilator_route(data):
    n = 12
    gm, rm = data.draw(small_module(n))
    gn, rn = data.draw(small_module(n))
    M, N = build(n, gm, rm), build(n, gn, rn)
    if N.size == 1:
        return
    v = search_precedes(M, N, 3)
    criterion = oracle.annihilator(rn, n, gn) <= oracle.annihilator(rm, n, gm)
    if v.outcome != UNKNOWN:
        assert (v.outcome == YES) == criterion
        assert _replays(M, N, v)


def _family(n):
    R = zmod(n)
    cyc = [cyclic(R, R.ideal([R.from_int(d)])) for d in oracle.divisors(n) if d != n]
    return cyc + [direct_sum(a, b) for a, b in itertools.combinations(cyc[:3], 2)]


@pytest.mark.parametrize("n", [4, 6, 12])
def test_preorder_laws(n):
    fam = _family(n)
    rel = {(i, j): precedes(a, b).outcome for (i, a), (j, b) in itertools.product(enumerate(fam), repeat=2)}
    assert all(rel[i, i] == YES for i in range(len(fam)))
    for i, j, k in itertools.product(range(len(fam)), repeat=3):
        if rel[i, j] == YES and rel[j, k] == YES:
            assert rel[i, k] == YES


@pytest.mark.parametrize("n", [6, 12])
def test_subobjects_and_quotients_precede(n):
    R = zmod(n)
    M = direct_sum(free(R, 1), cyclic(R, R.ideal([R.from_int(2)])))
    for S in all_submodules(M):
        if S.is_zero():
            continue
        sub, _ = S.as_module()
        quo, _ = S.quotient()
        assert precedes(sub, M).outcome == YES
        assert quo.size == 1 or precedes(quo, M).outcome == YES


def test_zero_module_conventions():
    R = zmod(6)
    assert precedes(zero_module(R), free(R, 1)).outcome == YES
    assert precedes(free(R, 1), zero_module(R)).outcome == NO
    with pytest.raises(ZeroModule):
        is_spectral(zero_module(R))


@pytest.mark.parametrize("n", [4, 6, 8, 12, 36])
def test_cyclic_spectral_iff_prime(n):
    R = zmod(n)
    primes = oracle.prime_divisors(n)
    for d in oracle.divisors(n)[1:]:
        M = cyclic(R, R.ideal([R.from_int(d)]))
        v = is_spectral(M)
        # d = n is R itself, whose zero ideal is prime only for prime n
        assert (v.outcome == YES) == (d in primes)


def test_spectral_submodule_route_agrees_with_fast_route():
    R = zmod(12)
    for d in (2, 3, 4, 6, 12):
        M = cyclic(R, R.ideal([R.from_int(d)]))
        assert is_spectral(M).outcome == is_spectral(M, fast=False).outcome


def _z4x2_prime_count():
    # elements a + b x over Z/4 with x^2 = 0, multiplied by hand
    els = [(a, b) for a in range(4) for b in range(4)]
    mul = lambda u, v: (u[0] * v[0] % 4, (u[0] * v[1] + u[1] * v[0]) % 4)
    units = {u for u in els if any(mul(u, v) == (1, 0) for v in els)}
    nonunits = [u for u in els if u not in units]
    closed = all(((u[0] + v[0]) % 4, (u[1] + v[1]) % 4) in nonunits for u in nonunits for v in nonunits)
    return 1 if closed else None  # local ring: exactly one prime


SPEC_RINGS = [(zmod(4), 1), (zmod(6), 2), (zmod(8), 1), (zmod(12), 2), (zmod(36), 2), (gf(4), 1),
              (z4_dual(), _z4x2_prime_count())]


@pytest.mark.parametrize("R,count", SPEC_RINGS, ids=lambda x: getattr(x, "label", str(x)))
def test_spec_points_classify(R, count):
    pts, report = spec_points(R)
    assert len(pts) == count
    assert all(v == YES for v in report["spectral"].values())
    assert all(r["ok"] for r in report["order"].values())
    assert all(r["replayed"] for r in report["rejected"].values())


def test_rejection_certificates_replay_and_detect_tampering():
    R = zmod(12)
    _, report = spec_points(R)
    for label, rec in report["rejected"].items():
        if rec["certificate"]["kind"] != "ColonObstruction":
            continue
        I = next(I for I in enumerate_ideals_primes(R)[0] if I.label() == label)
        bad = dict(rec["certificate"], r=list(R.one))
        assert replay_colon(R, I, rec["certificate"])
        assert not replay_colon(R, I, bad)


def test_ann_certificate_tampering_detected():
    R = zmod(4)
    M, N = free(R, 1), cyclic(R, R.ideal([R.from_int(2)]))
    v = precedes(M, N)
    assert v.outcome == NO and replay_certificate(M, N, v.certificate)
    assert not replay_certificate(M, N, dict(v.certificate, element=[1]))


def test_equivalence_is_annihilator_equality():
    R = zmod(12)
    fam = _family(12)
    for a, b in itertools.product(fam, repeat=2):
        same = annihilator(a).basis == annihilator(b).basis
        assert (equivalent(a, b)["outcome"] == YES) == same


# ---------------------------------------------------------------------------
# modules over F_p[t]


T = PolyRing(2)


def test_pid_decision_agrees_with_search():
    fam = pid_family(T, max_degree=2, max_rank=1, max_factors=1)
    disagreements = 0
    for M, N in itertools.product(fam, repeat=2):
        a = precedes_pid(M, N)
        assert replay_pid(M, N, a)
        b = search_precedes_pid(M, N, 3)
        if b.outcome != UNKNOWN and a.outcome != b.outcome:
            disagreements += 1
    assert disagreements == 0


@pytest.mark.parametrize("f,spectral", [((0, 1), True), ((1, 1, 1), True), ((0, 0, 1), False),
                                        ((0, 1, 1), False), ((1, 1, 0, 1), True)])
def test_pid_cyclic_spectral(f, spectral):
    assert (is_spectral(PidModule(T, 0, [f])).outcome == YES) == spectral


def test_pid_free_module_facts():
    R1, R2 = PidModule(T, 1), PidModule(T, 2)
    tors = PidModule(T, 0, [(0, 1)])
    assert is_spectral(R1).outcome == YES
    assert equivalent(R1, R2)["outcome"] == YES
    assert precedes_pid(tors, R1).outcome == YES
    assert precedes_pid(R1, tors).outcome == NO


def test_pid_mixed_input_rejected():
    with pytest.raises(NotPid):
        precedes_pid(free(zmod(4), 1), PidModule(T, 1))


def test_spec_of_polynomial_ring_window():
    pts, report = spec_points(T, 3)
    # (0) plus the monic irreducibles of degree <= 3
    want = 1 + sum(oracle.monic_irreducible_count(d, 2) for d in (1, 2, 3))
    assert len(pts) == want
    assert all(r["ok"] for r in report["order"].values())
