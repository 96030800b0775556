"""The preorder M < N ("M is a subquotient of a finite sum of copies of N"),
spectral objects and the spectrum of a module category as a set.

Two independent routes decide M < N for finite modules:

* certificates: if Ann(N) is not inside Ann(M) (or supp M is not inside
  supp N) the answer is no;
* search: M < N with n copies iff there are homs phi_1..phi_n : R^g -> N
  whose kernels intersect inside the relation module K of M (then the
  image P of R^g in N^n surjects onto M = R^g/K).  The search enumerates
  the distinct kernels and intersects them level by level.  When the
  levels stop growing the search has covered every n.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import howell as H
from . import poly as P
from .errors import MixedRings, NotPid, TooLarge, ZeroModule
from .modules import (FGModule, ModuleHom, annihilator, cyclic, direct_power,
                      free_map_kernel, hom_presentation,
                      support)
from .pidmod import (PidModule, pid_annihilator, support_contains)
from .rings import (FiniteRing, Ideal, PolyRing, PrimeIdeal,
                    enumerate_ideals_primes, ideal_colon, is_prime_ideal,
                    poly_quotient, poly_to_elem)

YES, NO, UNKNOWN = "Yes", "No", "Unknown"

HOM_TUPLE_CAP = 60000


@dataclass
class PrecedesVerdict:
    outcome: str
    witness: dict | None = None
    certificate: dict | None = None
    bound: int | None = None
    route: str = ""
    notes: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.outcome == YES

    def to_json(self) -> dict:
        out: dict[str, Any] = {"outcome": self.outcome, "route": self.route}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.bound is not None:
            out["bound"] = self.bound
        if self.notes:
            out["notes"] = self.notes
        return out


def _same(M, N):
    if M.ring is not N.ring and M.ring != N.ring:
        raise MixedRings(f"{M.ring.label} vs {N.ring.label}")


def default_bound(M) -> int:
    return max(3, M.g if isinstance(M, PidModule) else len(M.whole().generators()))


# ---------------------------------------------------------------------------
# certificates


def ann_certificate(M: FGModule, N: FGModule) -> dict | None:
    """An r with r*N = 0 but r*M != 0, if one exists."""
    AN, AM = annihilator(N), annihilator(M)
    for r in AN.generators():
        if not AM.contains(r):
            return {"kind": "AnnObstruction", "ann_N": AN.label(), "ann_M": AM.label(),
                    "element": list(r)}
    return None


def supp_certificate(M: FGModule, N: FGModule, primes) -> dict | None:
    sM = {p.ideal.basis: p for p in support(M, primes)}
    sN = {p.ideal.basis for p in support(N, primes)}
    for key, p in sM.items():
        if key not in sN:
            return {"kind": "SuppObstruction", "prime": p.label()}
    return None


def replay_certificate(M: FGModule, N: FGModule, cert: dict) -> bool:
    R = M.ring
    if cert["kind"] == "AnnObstruction":
        r = tuple(cert["element"])
        kills_N = all(N.is_zero_elem(N.act(r, N.gen(j))) for j in range(N.g))
        kills_M = all(M.is_zero_elem(M.act(r, M.gen(j))) for j in range(M.g))
        return kills_N and not kills_M
    if cert["kind"] == "SuppObstruction":
        _, primes = enumerate_ideals_primes(R)
        p = next(q for q in primes if q.label() == cert["prime"])
        return bool(support(M, [p])) and not support(N, [p])
    if cert["kind"] == "ExhaustedProof":
        v = search_precedes(M, N, bound=cert.get("levels", 1) + 1)
        return v.outcome == NO
    raise ValueError(f"unknown certificate {cert['kind']!r}")


# ---------------------------------------------------------------------------
# witness search


def minimal_presentation(M: FGModule) -> tuple[FGModule, list]:
    """M re-presented on a minimal generating set, with those generators."""
    gens = M.whole().generators()
    if len(gens) == M.g:
        return M, [M.gen(j) for j in range(M.g)]
    return hom_presentation(M, gens, label=M.label), gens


def hom_kernels(N: FGModule, g: int, cap: int = HOM_TUPLE_CAP) -> dict:
    """Distinct kernels of homs R^g -> N, each with one tuple realizing it."""
    elems = N.elements()
    if len(elems) ** g > cap:
        raise TooLarge(f"{len(elems)}^{g} hom tuples exceed cap {cap}")
    out: dict = {}
    for tup in itertools.product(elems, repeat=g):
        K = free_map_kernel(N, tup)
        out.setdefault(K, tup)
    return out


def search_precedes(M: FGModule, N: FGModule, bound: int | None = None) -> PrecedesVerdict:
    """Pure witness search: no annihilator or support reasoning."""
    _same(M, N)
    R = M.ring
    if bound is None:
        bound = default_bound(M)
    Mp, gens = minimal_presentation(M)
    g = Mp.g
    if g == 0:
        return PrecedesVerdict(YES, witness={"n": 0, "homs": [], "targets": []}, route="search")
    KM = Mp.K
    n_mod, width = R.N, R.k * g
    kernels = hom_kernels(N, g)

    def inside(L):
        return all(H.in_span(r, KM, n_mod) for r in L)

    # level sets: intersection -> list of contributing tuples
    level = {K: [t] for K, t in kernels.items()}
    seen = dict(level)
    for n in range(1, bound + 1):
        hit = next((K for K in sorted(level) if inside(K)), None)
        if hit is not None:
            homs = level[hit]
            wit = {"n": len(homs), "homs": [[[list(a) for a in v] for v in t] for t in homs],
                   "targets": [[list(a) for a in v] for v in gens]}
            return PrecedesVerdict(YES, witness=wit, bound=bound, route="search")
        new: dict = {}
        for K, ts in level.items():
            for K1, t1 in kernels.items():
                J = H.intersect(K, K1, n_mod, width)
                if J not in seen and J not in new:
                    new[J] = ts + [t1]
        if not new:
            cert = {"kind": "ExhaustedProof", "levels": n, "distinct_intersections": len(seen),
                    "reason": "every intersection of kernels of homs into N is already listed "
                              "and none lies in the relations of M"}
            return PrecedesVerdict(NO, certificate=cert, bound=bound, route="search")
        seen.update(new)
        level = new
    return PrecedesVerdict(UNKNOWN, bound=bound, route="search",
                           notes={"intersections_seen": len(seen)})


def replay_witness(M: FGModule, N: FGModule, wit: dict) -> bool:
    """Rebuild P inside N^n and check P -> M is a well-defined epimorphism."""
    n = wit["n"]
    gens = [tuple(tuple(a) for a in v) for v in wit["targets"]]
    if n == 0:
        return M.size == 1
    Nn = direct_power(N, n)
    g = len(gens)
    imgs = []
    for i in range(g):
        v = []
        for t in wit["homs"]:
            v.extend(tuple(a) for a in t[i])
        imgs.append(tuple(v))
    P = hom_presentation(Nn, imgs)
    try:
        epi = ModuleHom(P, M, gens)
        inc = ModuleHom(P, Nn, imgs)
    except Exception:
        return False
    return epi.is_surjective() and inc.is_injective()


# ---------------------------------------------------------------------------
# the public decision


def precedes(M, N, bound: int | None = None, primes=None) -> PrecedesVerdict:
    _same(M, N)
    if isinstance(M, PidModule):
        return precedes_pid(M, N)
    if bound is None:
        bound = default_bound(M)
    cert = ann_certificate(M, N)
    if cert:
        return PrecedesVerdict(NO, certificate=cert, bound=bound, route="certificate")
    if primes is None:
        _, primes = enumerate_ideals_primes(M.ring)
    cert = supp_certificate(M, N, primes)
    if cert:
        return PrecedesVerdict(NO, certificate=cert, bound=bound, route="certificate")
    return search_precedes(M, N, bound)


def equivalent(M, N, bound: int | None = None) -> dict:
    a = precedes(M, N, bound)
    b = precedes(N, M, bound)
    if a.outcome == YES and b.outcome == YES:
        out = YES
    elif NO in (a.outcome, b.outcome):
        out = NO
    else:
        out = UNKNOWN
    return {"outcome": out, "forward": a, "backward": b}


# ---------------------------------------------------------------------------
# principal ideal domains


def _component_exponents(M: PidModule) -> dict:
    out: dict = {}
    for g, e in M.primary_components():
        out.setdefault(g, []).append(e)
    return out


def precedes_pid(M: PidModule, N: PidModule) -> PrecedesVerdict:
    """Decide M < N from ranks and primary components."""
    if not isinstance(M, PidModule) or not isinstance(N, PidModule):
        raise NotPid("both modules must be over a principal ideal domain")
    _same(M, N)
    var = M.ring.var
    if M.is_zero():
        return PrecedesVerdict(YES, witness={"n": 0, "construction": "zero module"}, route="pid")
    if M.rank and not N.rank:
        return PrecedesVerdict(NO, certificate={"kind": "PidStructure", "reason": "rank",
                                                "rank_M": M.rank, "rank_N": 0}, route="pid")
    if N.rank:
        return PrecedesVerdict(YES, witness={"n": M.g, "construction": "free",
                                             "detail": "R^g inside the free part of N^g maps onto M"},
                               route="pid")
    comps_N = _component_exponents(N)
    pieces = []
    for g, e in M.primary_components():
        f = max(comps_N.get(g, [0]))
        if f < e:
            return PrecedesVerdict(NO, certificate={"kind": "PidStructure", "reason": "exponent",
                                                    "prime": P.fmt(g, var), "needed": e, "available": f},
                                   route="pid")
        pieces.append({"prime": list(g), "source_exponent": f, "target_exponent": e})
    return PrecedesVerdict(YES, witness={"n": len(pieces), "construction": "primary",
                                         "pieces": pieces}, route="pid")


def replay_pid(M: PidModule, N: PidModule, v: PrecedesVerdict) -> bool:
    if v.outcome == YES:
        w = v.witness
        if w["construction"] == "zero module":
            return M.is_zero()
        if w["construction"] == "free":
            eye = [[(1,) if i == j else P.ZERO for j in range(M.g)] for i in range(M.g)]
            return N.rank > 0 and M.spans(eye)
        comps_N = _component_exponents(N)
        want = sorted(M.primary_components())
        got = sorted((tuple(x["prime"]), x["target_exponent"]) for x in w["pieces"])
        return want == got and all(x["source_exponent"] >= x["target_exponent"]
                                   and x["source_exponent"] in comps_N.get(tuple(x["prime"]), [])
                                   for x in w["pieces"])
    c = v.certificate
    if c["reason"] == "rank":
        return M.rank > 0 and N.rank == 0
    comps_N = _component_exponents(N)
    for g, e in M.primary_components():
        if P.fmt(g, M.ring.var) == c["prime"] and e == c["needed"]:
            return max(comps_N.get(g, [0])) < e and N.rank == 0
    return False


def pid_to_finite(M: PidModule, a: P.Poly) -> FGModule:
    """M / aM as a module over the finite ring R/(a)."""
    R = M.ring
    S = poly_quotient(R, a)
    d = P.deg(P.monic(a, R.p))
    diag = M.diagonal()
    rels = []
    for i, f in enumerate(diag):
        if f:
            row = [S.zero] * len(diag)
            row[i] = poly_to_elem(P.rem(f, a, R.p), d)
            rels.append(row)
    return FGModule(S, len(diag), rels, label=M.describe())


def _lcm(a, b, p):
    return P.divmod_poly(P.mul(a, b, p), P.gcd(a, b, p), p)[0]


def search_precedes_pid(M: PidModule, N: PidModule, bound: int = 3) -> PrecedesVerdict:
    """Witness search for modules over F_p[t], independent of the invariant-factor criterion.

    Torsion pairs live over the finite ring R/(lcm of the annihilators),
    whose module category is closed under subquotients and sums in Mod R,
    so the finite search there is exact.  A torsion M against N of positive
    rank is searched against N/aN with a = Ann(M) (sound for yes).  Free
    parts give explicit witnesses.  An infinite M cannot be a quotient of a
    submodule of a finite N^n, which settles that case by cardinality.
    """
    _same(M, N)
    p = M.ring.p
    if M.is_zero():
        return PrecedesVerdict(YES, witness={"n": 0}, route="pid-search")
    if M.rank:
        if not N.rank:
            return PrecedesVerdict(NO, certificate={"kind": "ExhaustedProof",
                                                    "reason": "every submodule of N^n is finite, M is not"},
                                   bound=bound, route="pid-search")
        if M.g > bound:
            return PrecedesVerdict(UNKNOWN, bound=bound, route="pid-search")
        eye = [[(1,) if i == j else P.ZERO for j in range(M.g)] for i in range(M.g)]
        if M.spans(eye):
            return PrecedesVerdict(YES, witness={"n": M.g, "construction": "free"}, bound=bound,
                                   route="pid-search")
        return PrecedesVerdict(UNKNOWN, bound=bound, route="pid-search")
    aM = M.factors[-1]
    if N.rank:
        Mf, Nf = pid_to_finite(M, aM), pid_to_finite(N, aM)
        v = search_precedes(Mf, Nf, bound)
        if v.outcome == YES:
            v.route = "pid-search"
            return v
        return PrecedesVerdict(UNKNOWN, bound=bound, route="pid-search")
    if N.is_zero():
        return PrecedesVerdict(NO, certificate={"kind": "ExhaustedProof", "reason": "N = 0"},
                               bound=bound, route="pid-search")
    a = _lcm(aM, N.factors[-1], p)
    v = search_precedes(pid_to_finite(M, a), pid_to_finite(N, a), bound)
    v.route = "pid-search"
    return v


def pid_family(R: PolyRing, max_degree: int = 2, max_rank: int = 1, max_factors: int = 2) -> list[PidModule]:
    """All modules of rank <= max_rank with at most max_factors torsion factors of degree <= max_degree."""
    polys = []
    for d in range(1, max_degree + 1):
        polys.extend(P.monic_polys(d, R.p))
    chains: list[tuple] = [()]
    frontier: list[tuple] = [()]
    for _ in range(max_factors):
        nxt = []
        for ch in frontier:
            for f in polys:
                if not ch or P.divides(ch[-1], f, R.p):
                    nxt.append(ch + (f,))
        chains.extend(nxt)
        frontier = nxt
    out = []
    for r in range(max_rank + 1):
        for ch in chains:
            out.append(PidModule(R, r, ch))
    return out


# ---------------------------------------------------------------------------
# spectral objects


def colon_certificate(R: FiniteRing, I: Ideal) -> dict | None:
    """For non-prime I: r outside I with (I:r) not inside I."""
    for r in R.elements():
        if I.contains(r):
            continue
        C = ideal_colon(I, r)
        if not C.issubset(I):
            a = next(x for x in C.generators() if not I.contains(x))
            return {"kind": "ColonObstruction", "ideal": I.label(), "r": list(r),
                    "colon": C.label(), "outside": list(a)}
    return None


def replay_colon(R: FiniteRing, I: Ideal, cert: dict) -> bool:
    if cert["kind"] == "ZeroModule":
        return I.is_unit()
    r, a = tuple(cert["r"]), tuple(cert["outside"])
    return (not I.contains(r)) and (not I.contains(a)) and I.contains(R.mul(a, r))


@dataclass
class SpectralVerdict:
    outcome: str
    counterexample: Any = None
    evidence: list = field(default_factory=list)
    certificate: dict | None = None
    route: str = ""

    def to_json(self) -> dict:
        out = {"outcome": self.outcome, "route": self.route}
        if self.certificate:
            out["certificate"] = self.certificate
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        out["checked_submodules"] = len(self.evidence)
        return out


def is_spectral(M, bound: int | None = None, fast: bool = True) -> SpectralVerdict:
    """Every nonzero submodule N of M satisfies M < N."""
    if isinstance(M, PidModule):
        return _is_spectral_pid(M)
    if M.size == 1:
        raise ZeroModule("the zero module is never spectral")
    R = M.ring
    if fast and M.g == 1:
        I = Ideal(R, M.K) if R.k == M.ncols else None
        if I is not None:
            if is_prime_ideal(I):
                return SpectralVerdict(YES, route="prime",
                                       certificate={"kind": "PrimeQuotient", "ideal": I.label()})
            cert = colon_certificate(R, I)
            if cert:
                return SpectralVerdict(NO, route="colon", certificate=cert,
                                       counterexample=cert["r"])
    _, primes = enumerate_ideals_primes(R)
    evidence = []
    from .modules import all_submodules
    for S in all_submodules(M):
        if S.is_zero():
            continue
        Nmod, _ = S.as_module()
        v = precedes(M, Nmod, bound, primes)
        evidence.append((S, v))
        if v.outcome == NO:
            gens = [[list(a) for a in g] for g in S.generators()]
            return SpectralVerdict(NO, counterexample=gens, evidence=evidence,
                                   certificate=v.certificate, route="submodules")
        if v.outcome == UNKNOWN:
            return SpectralVerdict(UNKNOWN, counterexample=None, evidence=evidence, route="submodules")
    return SpectralVerdict(YES, evidence=evidence, route="submodules")


def _is_spectral_pid(M: PidModule) -> SpectralVerdict:
    """Spectral iff every nonzero element has annihilator Ann(M): R^r or (R/p)^k."""
    if M.is_zero():
        raise ZeroModule("the zero module is never spectral")
    p, var = M.ring.p, M.ring.var
    if M.rank and not M.factors:
        return SpectralVerdict(YES, route="prime", certificate={"kind": "PrimeQuotient", "ideal": "(0)"})
    if M.rank:
        d = M.factors[0]
        return SpectralVerdict(NO, route="colon", counterexample=f"torsion element killed by ({P.fmt(d, var)})",
                               certificate={"kind": "AnnObstruction", "ann_M": "(0)",
                                            "ann_sub": f"({P.fmt(d, var)})"})
    d = M.factors[-1]
    if P.is_irreducible(d, p):
        return SpectralVerdict(YES, route="prime",
                               certificate={"kind": "PrimeQuotient", "ideal": f"({P.fmt(d, var)})"})
    g = P.factor(d, p)[0][0]
    r = P.divmod_poly(d, g, p)[0]
    return SpectralVerdict(NO, route="colon", counterexample=f"({P.fmt(r, var)}) * last generator",
                           certificate={"kind": "ColonObstruction", "r": list(r),
                                        "colon": f"({P.fmt(g, var)})", "ann_M": f"({P.fmt(d, var)})"})


@dataclass
class SpectrumPoint:
    prime: PrimeIdeal
    representative: Any
    label: str

    def to_json(self) -> dict:
        return {"prime": self.label, "representative": f"R/{self.label}"}


def spec_points(R, degree_bound: int | None = None, verify: bool = True) -> tuple[list[SpectrumPoint], dict]:
    """One point per prime, with the checks that make the list a classification."""
    _, primes = enumerate_ideals_primes(R, degree_bound)
    pts = []
    report: dict = {"spectral": {}, "order": {}, "rejected": {}}
    for q in primes:
        if isinstance(R, FiniteRing):
            rep = cyclic(R, q.ideal)
        else:
            rep = PidModule(R, 1 if q.ideal.is_zero() else 0, [] if q.ideal.is_zero() else [q.ideal.gen])
        pts.append(SpectrumPoint(q, rep, q.label()))
    if not verify:
        return pts, report
    for pt in pts:
        v = is_spectral(pt.representative, fast=not isinstance(R, FiniteRing))
        report["spectral"][pt.label] = v.outcome
    for a in pts:
        for b in pts:
            v = precedes(a.representative, b.representative)
            expected = b.prime.ideal.issubset(a.prime.ideal)
            report["order"][f"{a.label}<{b.label}"] = {"outcome": v.outcome, "expected": expected,
                                                      "ok": (v.outcome == YES) == expected
                                                      and v.outcome != UNKNOWN}
    if isinstance(R, FiniteRing):
        from .rings import all_ideals
        for I in all_ideals(R):
            if is_prime_ideal(I):
                continue
            if I.is_unit():
                cert = {"kind": "ZeroModule"}
            else:
                v = is_spectral(cyclic(R, I))
                cert = v.certificate if v.outcome == NO else None
            ok = cert is not None and replay_colon(R, I, cert)
            report["rejected"][I.label()] = {"certificate": cert, "replayed": ok}
    return pts, report


def abstract_support(M, points: Sequence[SpectrumPoint]) -> list[SpectrumPoint]:
    """{[R/p] : R/p < M} by the element-annihilator criterion, checked against V(Ann M)."""
    if isinstance(M, PidModule):
        out = [pt for pt in points if support_contains(M, pt.prime)]
        A = pid_annihilator(M)
        via_ann = [pt for pt in points if A.issubset(pt.prime.ideal)]
        assert [pt.label for pt in out] == [pt.label for pt in via_ann], "support mismatch"
        return out
    if points and M.ring is not points[0].prime.ring:
        raise MixedRings("points of another ring")
    primes = [pt.prime for pt in points]
    sup = support(M, primes)
    keys = {q.ideal.basis for q in sup}
    out = [pt for pt in points if pt.prime.ideal.basis in keys]
    A = annihilator(M)
    via_ann = [pt for pt in points if A.issubset(pt.prime.ideal)] if M.size > 1 else []
    assert [pt.label for pt in out] == [pt.label for pt in via_ann], "support mismatch"
    return out
