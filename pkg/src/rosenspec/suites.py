"""Named property suites run by ``rosenspec verify``."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import NotIntegral, UnknownSuite
from .modules import (all_submodules, annihilator, annihilator_support, cyclic, direct_sum, in_T,
                      ideal_times_module, support)
from .pidmod import PidModule, pid_annihilator, support_contains
from .quotient import (center_of_category, center_of_quotient, localization_model, opens,
                       test_family, thick_of_open, thickness_report)
from .rings import FiniteRing, PolyRing, all_ideals, enumerate_ideals_primes, ideal_ops, is_prime_ideal
from .spectrum import (UNKNOWN, YES, abstract_support, pid_family, search_precedes,
                       search_precedes_pid, spec_points)
from .topology import (TopReflSubcat, affine_homeo_check, build_topology, gabriel_product, ideal_of_t,
                       reflector)
from . import scheme as Sch

PASS, FAIL, UNK = "pass", "fail", "unknown"


@dataclass
class Check:
    name: str
    status: str
    detail: Any = None

    def to_json(self) -> dict:
        out = {"name": self.name, "status": self.status}
        if self.detail is not None:
            out["detail"] = self.detail
        return out


@dataclass
class VerifyReport:
    suite: str
    instance: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    def add(self, name: str, ok: bool | None, detail: Any = None) -> None:
        status = UNK if ok is None else (PASS if ok else FAIL)
        self.checks.append(Check(name, status, detail))

    def counts(self) -> dict:
        out = {PASS: 0, FAIL: 0, UNK: 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    def failed(self, strict: bool = False) -> bool:
        c = self.counts()
        return c[FAIL] > 0 or (strict and c[UNK] > 0)

    def to_json(self, timing: bool = False) -> dict:
        out = {"suite": self.suite, "instance": self.instance, "counts": self.counts(),
               "checks": [c.to_json() for c in self.checks]}
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


@dataclass
class Instance:
    ring: Any = None
    scheme: Any = None
    bound: int = 3
    seed: int = 0

    def describe(self) -> str:
        if self.scheme is not None:
            return self.scheme.label
        return self.ring.label if self.ring is not None else "-"


def _finite(inst: Instance) -> FiniteRing:
    if not isinstance(inst.ring, FiniteRing):
        raise TypeError("this suite needs a finite ring (--ring zmod:n, gf:q, ...)")
    return inst.ring


def _scheme(inst: Instance) -> Sch.GluedScheme:
    if inst.scheme is not None:
        return inst.scheme
    return Sch.affine(inst.ring)


def _fmt_ideal(I) -> str:
    return I.label()


# ---------------------------------------------------------------------------
# spectrum and support


def suite_supp(inst: Instance, rep: VerifyReport) -> None:
    R = inst.ring
    if isinstance(R, PolyRing):
        primes = R.primes(inst.bound)
        for M in pid_family(R, max_degree=min(inst.bound, 2)):
            for q in primes:
                rp = PidModule(R, 1 if q.ideal.is_zero() else 0, [] if q.ideal.is_zero() else [q.ideal.gen])
                v = search_precedes_pid(rp, M, inst.bound)
                want = support_contains(M, q)
                ok = None if v.outcome == UNKNOWN else (v.outcome == YES) == want
                rep.add(f"R/{q.label()} < {M.describe()} iff localization nonzero", ok)
        return
    R = _finite(inst)
    _, primes = enumerate_ideals_primes(R)
    for M in test_family(R):
        if M.size > 144:
            continue
        for q in primes:
            v = search_precedes(cyclic(R, q.ideal), M, inst.bound)
            want = bool(support(M, [q]))
            ok = None if v.outcome == UNKNOWN else (v.outcome == YES) == want
            rep.add(f"R/{q.label()} < {M.label} iff M_p != 0", ok,
                    {"search": v.outcome, "support": want})


def suite_specaff(inst: Instance, rep: VerifyReport) -> None:
    R = inst.ring
    bound = None if isinstance(R, FiniteRing) else inst.bound
    pts, report = spec_points(R, bound)
    _, primes = enumerate_ideals_primes(R, bound)
    rep.add("one point per prime", [p.label for p in pts] == [q.label() for q in primes],
            [p.label for p in pts])
    for lab, out in report["spectral"].items():
        rep.add(f"R/{lab} spectral", out == YES if out != UNKNOWN else None)
    for lab, rec in report["order"].items():
        rep.add(f"order {lab}", rec["ok"])
    for lab, rec in report["rejected"].items():
        rep.add(f"R/{lab} rejected with replayed certificate", rec["replayed"])


def suite_specsupp(inst: Instance, rep: VerifyReport) -> None:
    if inst.scheme is not None:
        X = inst.scheme
        pts = Sch.points(X, inst.bound)
        recs, _ = Sch._point_records(X, pts)
        for r in recs:
            for key in ("spectral_chartwise", "support_is_closure", "generic_point", "annihilator_is_J",
                        "torsion_free_pullback"):
                rep.add(f"{r['point']}: {key.replace('_', ' ')}", r[key])
        return
    R = inst.ring
    bound = None if isinstance(R, FiniteRing) else inst.bound
    pts, _ = spec_points(R, bound, verify=False)
    for pt in pts:
        supp = abstract_support(pt.representative, pts)
        closure = [q for q in pts if pt.prime.ideal.issubset(q.prime.ideal)]
        rep.add(f"supp R/{pt.label} is the closure of {pt.label}",
                [q.label for q in supp] == [q.label for q in closure])
        if isinstance(R, FiniteRing):
            A = annihilator(pt.representative)
            rep.add(f"Ann R/{pt.label} = {pt.label}, a prime", A.basis == pt.prime.ideal.basis and is_prime_ideal(A))
            _, vs = annihilator_support(pt.representative, [q.prime for q in pts])
            rep.add(f"V(Ann) = supp for R/{pt.label}", [q.label() for q in vs] == [q.label for q in supp])
        else:
            A = pid_annihilator(pt.representative)
            rep.add(f"Ann R/{pt.label} = {pt.label}", A.gen == pt.prime.ideal.gen)


def suite_toreq(inst: Instance, rep: VerifyReport) -> None:
    X = inst.scheme if inst.scheme is not None else None
    if X is None:
        R = inst.ring
        if isinstance(R, FiniteRing) and not R.is_domain:
            raise NotIntegral(f"{R.label} is not a domain")
        X = Sch.affine(R)
    if isinstance(X.charts[0], FiniteRing):
        # a finite domain is a field: torsion-free modules are free
        R = X.charts[0]
        from .modules import free
        from .spectrum import equivalent
        for g in (1, 2, 3):
            rep.add(f"R^{g} equivalent to R", equivalent(free(R, g), free(R, 1))["outcome"] == YES)
        return
    if not X.is_integral():
        raise NotIntegral(f"{X.label} is not integral")
    O = Sch.structure_sheaf(X)
    samples = [O, Sch.direct_sum(O, O)]
    if X.p1 is not None:
        samples += [Sch.twist(X, n) for n in range(-2, 4)]
        samples.append(Sch.direct_sum(Sch.twist(X, -1), Sch.twist(X, 2)))
    for M in samples:
        rep.add(f"{M.label} torsion-free", Sch.is_torsion_free(M))
        rep.add(f"{M.label} equivalent to O", Sch.equivalent_sheaf(M, O))


def suite_rekon_menge(inst: Instance, rep: VerifyReport) -> None:
    X = _scheme(inst)
    pts = Sch.points(X, inst.bound)
    recs, bij = Sch._point_records(X, pts)
    for r in recs:
        rep.add(f"[O/J{r['point']}] is a spectral class", r["ok"])
    rep.add("x -> [O/J_x] respects closure order", not bij["order_mismatches"], bij["order_mismatches"] or None)
    rep.add("distinct points give distinct classes", not bij["identified_distinct"])


def suite_suppsch(inst: Instance, rep: VerifyReport) -> None:
    X = _scheme(inst)
    pts = Sch.points(X, inst.bound)
    sheaves = [Sch.structure_sheaf(X)]
    sheaves += [Sch.skyscraper(X, x) for x in pts]
    if X.p1 is not None:
        sheaves += [Sch.twist(X, 1), Sch.direct_sum(Sch.skyscraper(X, pts[1]), Sch.twist(X, -1))]
    for name, gens in Sch._ideal_family(X, pts)[:8]:
        sheaves.append(Sch.ideal_quotient(X, gens, label=f"O/{name}"))
    for x in pts:
        S_ = Sch.skyscraper(X, x)
        plain = Sch.QcohSheaf(X, S_.modules, S_.trans, label=S_.label, check=False)
        for M in sheaves:
            a = Sch.precedes_sheaf(S_, M)
            b = Sch.precedes_sheaf(plain, M)
            want = Sch.in_support(M, x)
            ok = None if b.outcome == UNKNOWN else (a.outcome == YES) == want == (b.outcome == YES)
            rep.add(f"O/J{x.label} < {M.label} iff {x.label} in supp", ok,
                    {"criterion": a.outcome, "chartwise": b.outcome})


# ---------------------------------------------------------------------------
# reflective subcategories and topology


def suite_reflchar(inst: Instance, rep: VerifyReport) -> None:
    R = _finite(inst)
    ideals = all_ideals(R)
    for I in ideals:
        T = TopReflSubcat(I)
        for J in ideals:
            M = cyclic(R, J)
            cert = reflector(T, M).certificate
            rep.add(f"reflection of R/{J.label()} into T{I.label()} is minimal",
                    cert["minimal"] and cert["unit_is_epimorphism"] and cert["quotient_in_T"])


def suite_ideal_bijection(inst: Instance, rep: VerifyReport) -> None:
    R = _finite(inst)
    ideals = all_ideals(R)
    for I in ideals:
        back = ideal_of_t([cyclic(R, I)])
        rep.add(f"I{I.label()} -> T -> ideal recovers I", back.basis == I.basis)
    for I in ideals:
        for J in ideals:
            inc = I.issubset(J)
            rev = TopReflSubcat(I).contains(cyclic(R, J))
            rep.add(f"{I.label()} in {J.label()} iff T{J.label()} inside T{I.label()}", inc == rev)
    sigs = {tuple(TopReflSubcat(I).contains(cyclic(R, J)) for J in ideals) for I in ideals}
    rep.add("distinct ideals give distinct subcategories", len(sigs) == len(ideals))


def suite_intersec(inst: Instance, rep: VerifyReport) -> None:
    R = _finite(inst)
    ideals = all_ideals(R)
    fam = test_family(R)
    _, primes = enumerate_ideals_primes(R)
    from .topology import V_cat
    for I, J in itertools.combinations_with_replacement(ideals, 2):
        s = ideal_ops(R, "sum", I, J)
        both = all((in_T(I, M) and in_T(J, M)) == in_T(s, M) for M in fam)
        rep.add(f"T{I.label()} & T{J.label()} = T{s.label()}", both)
        v = set(V_cat(TopReflSubcat(I), primes)) & set(V_cat(TopReflSubcat(J), primes))
        rep.add(f"V meets for {I.label()},{J.label()}", v == set(V_cat(TopReflSubcat(s), primes)))


def suite_gabriel_product(inst: Instance, rep: VerifyReport) -> None:
    R = _finite(inst)
    ideals = all_ideals(R)
    fam = [cyclic(R, I) for I in ideals]
    lattices = {M.key(): all_submodules(M) for M in fam}
    for I in ideals:
        for J in ideals:
            prod, suite = gabriel_product(TopReflSubcat(I), TopReflSubcat(J), fam, lattices)
            IJ = ideal_ops(R, "product", I, J)
            rep.add(f"T{I.label()} . T{J.label()} = T{IJ.label()}",
                    prod.ideal.basis == IJ.basis and all(r["ok"] for r in suite))
    top = build_topology(R)
    rep.add("closed-set identities", top["ok"])
    if len(ideals) <= 12:
        for I, J, K in itertools.product(ideals, repeat=3):
            a = ideal_ops(R, "product", ideal_ops(R, "product", I, J), K)
            b = ideal_ops(R, "product", I, ideal_ops(R, "product", J, K))
            rep.add(f"associativity {I.label()}{J.label()}{K.label()}", a.basis == b.basis)


def suite_zartop(inst: Instance, rep: VerifyReport) -> None:
    R = inst.ring
    bound = None if isinstance(R, FiniteRing) else inst.bound
    top = build_topology(R, bound)
    for name, ok in top["checks"]:
        rep.add(name, ok)
    rep.add("closed sets", True, top["closed_sets"])


def suite_rekon_top(inst: Instance, rep: VerifyReport) -> None:
    if inst.scheme is not None:
        X = inst.scheme
        pts = Sch.points(X, inst.bound)
        top = Sch._topology_records(X, pts)
        for r in top["ideals"]:
            rep.add(f"V(T{r['ideal']}) = supp O/{r['ideal']}", r["ok"])
        rep.add("union and intersection laws", top["union_intersection_laws"])
        return
    R = inst.ring
    out = affine_homeo_check(R, None if isinstance(R, FiniteRing) else inst.bound)
    for b in out["bits"]:
        rep.add(f"R/{b['prime']} in T{b['ideal']} iff {b['ideal']} in {b['prime']}", b["ok"])


def suite_sep(inst: Instance, rep: VerifyReport) -> None:
    X = inst.scheme if inst.scheme is not None else Sch.p1(2)
    for (i, j) in sorted(X.gluing):
        if i < j:
            r = Sch.overlap_check(X, i, j, inst.bound)
            rep.add(f"theta {i}->{j} is a ring isomorphism", r["inverse_on_generators"] and r["ring_hom"]
                    and r["lands_in_overlap"])
            rep.add(f"chart sections span the overlap {i},{j} up to degree {inst.bound}", r["sections_span"])
    if X.p1 is not None:
        for n in range(-1, inst.bound + 1):
            s = Sch.global_sections(Sch.twist(X, n))
            rep.add(f"dim sections O({n}) = {max(n + 1, 0)}", s.dimension == max(n + 1, 0) and s.stable)


def suite_reflprod_finite(inst: Instance, rep: VerifyReport) -> None:
    R = _finite(inst)
    ideals = all_ideals(R)
    fam = [cyclic(R, I) for I in ideals]
    for I in ideals:
        inside = [M for M in fam if in_T(I, M)]
        ok = all(in_T(I, direct_sum(M, N)) for M in inside for N in inside)
        rep.add(f"T{I.label()} closed under finite sums", ok)
        for M in fam:
            co = [S for S in all_submodules(M) if in_T(I, S.quotient()[0])]
            L = co[0]
            for S in co[1:]:
                L = L & S
            rep.add(f"meet of co-T{I.label()} submodules of R/{_label_of(M)} is I*M",
                    L.basis == ideal_times_module(I, M).basis and in_T(I, L.quotient()[0]))


def _label_of(M) -> str:
    return M.label.split("/", 1)[-1] if "/" in M.label else M.label


# ---------------------------------------------------------------------------
# centers and quotient categories


def suite_modzen(inst: Instance, rep: VerifyReport) -> None:
    R = inst.ring
    if isinstance(R, PolyRing):
        c = Sch.pid_center(R, min(inst.bound, 2))
        rep.add("multiplications natural on the sampled family", c["natural"])
        rep.add("evaluation injective", c["evaluation_injective"])
        rep.add("evaluation a ring map", c["ring_hom"])
        return
    c = center_of_category(R, test_family(R))
    rep.add("center order equals |R|", c.order == c.ring_order, {"center": c.order, "ring": c.ring_order})
    rep.add("multiplications natural", c.multiplications_natural)
    rep.add("evaluation bijective", c.evaluation_injective and c.order == c.ring_order)


def _opens(R):
    _, primes = enumerate_ideals_primes(R)
    return primes, opens(R, primes)


def suite_lok(inst: Instance, rep: VerifyReport) -> None:
    R = _finite(inst)
    primes, all_opens = _opens(R)
    fam = test_family(R, sums=R.size <= 8)
    for U in all_opens:
        out = localization_model(thick_of_open(R, U, primes), fam)
        rep.add(f"Hom in quotient by <{{{','.join(U)}}}> = Hom over the localization", out["bijective"])
        rep.add(f"natural for U = {{{','.join(U)}}}", out["natural"])


def suite_zentrumlokal(inst: Instance, rep: VerifyReport) -> None:
    R = _finite(inst)
    primes, all_opens = _opens(R)
    fam = test_family(R, sums=R.size <= 8)
    for U in all_opens:
        C = center_of_quotient(R, thick_of_open(R, U, primes), fam)
        for k in ("commutative", "evaluation_bijective", "evaluation_ring_hom", "restriction_is_localization",
                  "natural_on_family"):
            rep.add(f"U = {{{','.join(U)}}}: {k.replace('_', ' ')}", C.report[k])


def suite_isthick(inst: Instance, rep: VerifyReport) -> None:
    R = _finite(inst)
    primes, all_opens = _opens(R)
    fam = test_family(R, sums=R.size <= 12)
    for U in all_opens:
        out = thickness_report(thick_of_open(R, U, primes), fam)
        for k in ("subobjects", "quotients", "extensions"):
            rep.add(f"<{{{','.join(U)}}}> closed under {k}", out[k])


def suite_rekon_sch(inst: Instance, rep: VerifyReport) -> None:
    X = _scheme(inst)
    out = Sch.spec_of_qcoh(X, inst.bound if any(isinstance(R, PolyRing) for R in X.charts) else None)
    for comp in out["components"]:
        st = comp["structure"]
        for r in st.get("opens", []):
            rep.add(f"O({r['open']}) = {r['ring']}", r["ok"])
        for r in st.get("rings", []):
            rep.add(f"O({r['open']}) = {r['ring']}", r["ok"])
        for k in ("triangle", "gluing", "global_restriction"):
            if k in st:
                rep.add(f"restriction {k.replace('_', ' ')}", st[k])
        for s in comp.get("sections", []):
            rep.add(f"dim sections O({s['n']}) = {s['expected']}", s["ok"])


# ---------------------------------------------------------------------------
# twists


def _twist_scheme(inst: Instance) -> Sch.GluedScheme:
    X = inst.scheme if inst.scheme is not None else Sch.p1(2, "rational")
    if X.p1 is None:
        raise TypeError("twist suites need a projective-line model (--scheme p1:q:rational)")
    return X


def suite_fine(inst: Instance, rep: VerifyReport) -> None:
    X = _twist_scheme(inst)
    window = min(inst.bound, 3)
    seen = {}
    for f in Sch.automorphisms(X):
        for n in range(-2, 4):
            r = Sch.twist_round_trip(X, f.matrix, n, window)
            rep.add(f"round trip ({list(f.matrix)}, O({n}))", r["ok"])
            seen.setdefault((tuple(r["recovered_matrix"]), r["recovered_degree"]), []).append((f.matrix, n))
    rep.add("distinct twist data give distinct functors", all(len(v) == 1 for v in seen.values()))


def suite_aut_group(inst: Instance, rep: VerifyReport) -> None:
    X = _twist_scheme(inst)
    window = min(inst.bound, 3)
    auts = Sch.automorphisms(X)
    p = X.p
    mats = {f.matrix for f in auts}
    rep.add("automorphisms closed under composition",
            all(Sch.mob_mul(a, b, p) in mats for a in mats for b in mats))
    for A, n, B, m in Sch.sample_pairs(X, 10, inst.seed):
        r = Sch.composition_check(X, A, n, B, m, window)
        rep.add(f"({list(A)}, O({n})) o ({list(B)}, O({m}))", r["ok"], {"recovered": r["recovered"],
                                                                     "predicted": r["predicted"]})


SUITES: dict[str, tuple[Callable, str]] = {
    "supp": (suite_supp, "zmod:12"),
    "specaff": (suite_specaff, "zmod:12"),
    "specsupp": (suite_specsupp, "zmod:12"),
    "toreq": (suite_toreq, "p1:2"),
    "rekon-menge": (suite_rekon_menge, "zmod:12"),
    "suppsch": (suite_suppsch, "p1:2"),
    "reflchar": (suite_reflchar, "zmod:12"),
    "ideal-bijection": (suite_ideal_bijection, "zmod:12"),
    "intersec": (suite_intersec, "zmod:12"),
    "gabriel-product": (suite_gabriel_product, "zmod:36"),
    "zartop": (suite_zartop, "zmod:12"),
    "rekon-top": (suite_rekon_top, "zmod:12"),
    "sep": (suite_sep, "p1:2"),
    "reflprod-finite": (suite_reflprod_finite, "zmod:12"),
    "modzen": (suite_modzen, "zmod:6"),
    "lok": (suite_lok, "zmod:6"),
    "zentrumlokal": (suite_zentrumlokal, "zmod:6"),
    "isthick": (suite_isthick, "zmod:6"),
    "rekon-sch": (suite_rekon_sch, "zmod:6"),
    "fine": (suite_fine, "p1:2:rational"),
    "aut-group": (suite_aut_group, "p1:2:rational"),
}


def run_suite(name: str, inst: Instance) -> VerifyReport:
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    fn, _ = SUITES[name]
    rep = VerifyReport(name, inst.describe())
    t = time.perf_counter()
    fn(inst, rep)
    rep.seconds = time.perf_counter() - t
    return rep
