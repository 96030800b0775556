"""Quotient categories Mod(R)/<U> for finite R, their centers, and the
structure presheaf U -> Z(Mod(R)/<U>).

<U> is the thick subcategory of modules whose support misses the open set
U.  A morphism M -> N of the quotient is a hom X' -> N/N', where X' is the
smallest submodule of M with M/X' in <U> and N' the largest submodule of N
inside <U>.  Both are found by sweeping the submodule lattice.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Sequence

from . import howell as H
from .errors import MismatchBug
from .modules import (FGModule, HomGroup, ModuleHom, Submodule, all_submodules,
                      cyclic, direct_sum, free, hom_group, ring_mul_vec,
                      support)
from .rings import (FiniteRing, PrimeIdeal, all_ideals, enumerate_ideals_primes,
                    local_idempotent, quotient_ring)


# ---------------------------------------------------------------------------
# thick subcategories


@dataclass(frozen=True)
class ThickSubcat:
    ring: FiniteRing = field(compare=False, hash=False)
    open_set: tuple  # labels of the primes in U
    primes: tuple = field(compare=False, hash=False, default=())

    @property
    def U(self) -> list[PrimeIdeal]:
        return [q for q in self.primes if q.label() in self.open_set]

    def contains(self, M: FGModule) -> bool:
        return not support(M, self.U)

    def idempotent(self):
        """e_U: the sum of the primitive idempotents of the primes in U."""
        R = self.ring
        return reduce(R.add, (local_idempotent(q) for q in self.U), R.zero)

    def label(self) -> str:
        return "<{" + ",".join(self.open_set) + "}>"


def thick_of_open(R: FiniteRing, U: Sequence[str], primes=None) -> ThickSubcat:
    if primes is None:
        _, primes = enumerate_ideals_primes(R)
    labels = [q.label() for q in primes]
    missing = [u for u in U if u not in labels]
    if missing:
        raise ValueError(f"not primes of {R.label}: {missing}")
    ordered = tuple(l for l in labels if l in U)
    return ThickSubcat(R, ordered, tuple(primes))


def opens(R: FiniteRing, primes=None) -> list[tuple]:
    """Every subset of Spec R (the topology of a finite ring is discrete)."""
    if primes is None:
        _, primes = enumerate_ideals_primes(R)
    labels = [q.label() for q in primes]
    out = []
    for r in range(len(labels) + 1):
        out.extend(itertools.combinations(labels, r))
    return out


def thickness_report(T: ThickSubcat, family: Sequence[FGModule]) -> dict:
    """Closure of T under submodules, quotients and extensions on the family."""
    checks = {"subobjects": True, "quotients": True, "extensions": True}
    for M in family:
        subs = all_submodules(M)
        if T.contains(M):
            for S in subs:
                checks["subobjects"] &= T.contains(S.as_module()[0])
                checks["quotients"] &= T.contains(S.quotient()[0])
        for S in subs:
            if T.contains(S.as_module()[0]) and T.contains(S.quotient()[0]):
                checks["extensions"] &= T.contains(M)
    checks["ok"] = all(checks.values())
    return checks


# ---------------------------------------------------------------------------
# reduced pairs and quotient homs


@dataclass
class Reduced:
    module: FGModule
    X: Submodule             # smallest with M/X in T
    Nprime: Submodule        # largest inside T
    Xmod: FGModule           # X presented on its own generators
    Xgens: list              # those generators, as elements of the module
    Q: FGModule              # M / N'
    proj: ModuleHom          # M -> M/N'
    certificate: dict


def reduce_pair(M: FGModule, T: ThickSubcat) -> Reduced:
    """X' and N' for one module, both certified against the lattice and the idempotent model."""
    subs = all_submodules(M)
    co = [S for S in subs if T.contains(S.quotient()[0])]
    X = reduce(lambda a, b: a & b, co)
    ins = [S for S in subs if T.contains(S.as_module()[0])]
    Np = reduce(lambda a, b: a + b, ins)
    R = M.ring
    e = T.idempotent()
    f = R.sub(R.one, e)
    eM = M.submodule([ring_mul_vec(R, e, M.gen(j)) for j in range(M.g)])
    fM = M.submodule([ring_mul_vec(R, f, M.gen(j)) for j in range(M.g)])
    cert = {"X_smallest": T.contains(X.quotient()[0]) and all(X.issubset(S) for S in co),
            "N_largest": T.contains(Np.as_module()[0]) and all(S.issubset(Np) for S in ins),
            "X_is_eM": X.basis == eM.basis, "N_is_fM": Np.basis == fM.basis}
    Xmod, incl = X.as_module()
    Q, proj = Np.quotient()
    return Reduced(M, X, Np, Xmod, list(incl.images), Q, proj, cert)


@dataclass
class QuotHom:
    source: FGModule
    target: FGModule
    hom: ModuleHom           # X'_source -> target / N'_target

    def key(self):
        return self.hom.key()


class QuotientCategory:
    """Mod(R)/T with cached reductions."""

    def __init__(self, T: ThickSubcat):
        self.T = T
        self.ring = T.ring
        self._red: dict = {}
        self._lift: dict = {}

    def reduced(self, M: FGModule) -> Reduced:
        k = M.key()
        if k not in self._red:
            self._red[k] = reduce_pair(M, self.T)
        return self._red[k]

    def hom_group(self, M: FGModule, N: FGModule) -> HomGroup:
        return hom_group(self.reduced(M).Xmod, self.reduced(N).Q)

    def homs(self, M: FGModule, N: FGModule) -> list[QuotHom]:
        return [QuotHom(M, N, h) for h in self.hom_group(M, N).elements()]

    def hom_generators(self, M: FGModule, N: FGModule) -> list[QuotHom]:
        return [QuotHom(M, N, h) for h in self.hom_group(M, N).generators()]

    def image_of(self, u: ModuleHom) -> QuotHom:
        """The quotient functor on a module hom."""
        rM, rN = self.reduced(u.source), self.reduced(u.target)
        imgs = [rN.proj(u(x)) for x in rM.Xgens]
        return QuotHom(u.source, u.target, ModuleHom(rM.Xmod, rN.Q, imgs, check=False))

    def identity(self, M: FGModule) -> QuotHom:
        from .modules import identity_hom
        return self.image_of(identity_hom(M))

    def _lifter(self, N: FGModule) -> dict:
        """Canonical coordinates in N/N' of elements of X'_N -> preimage in X'_N's presentation."""
        k = N.key()
        if k not in self._lift:
            r = self.reduced(N)
            table = {}
            inc = ModuleHom(r.Xmod, N, r.Xgens, check=False)
            for v in r.Xmod.elements():
                c = r.Q.coords(r.proj(inc(v)))
                table.setdefault(c, v)
            # X'_N meet N', on which every composable g must vanish
            meet = r.proj.compose(inc).kernel().generators()
            self._lift[k] = (table, meet)
        return self._lift[k]

    def compose(self, g: QuotHom, f: QuotHom) -> QuotHom:
        """g after f, lifting the values of f through X'_N."""
        N = f.target
        rN = self.reduced(N)
        table, meet = self._lifter(N)
        imgs = []
        for z in f.hom.images:
            c = rN.Q.coords(z)
            if c not in table:
                raise MismatchBug("value of a reduced hom outside the image of X'")
            imgs.append(g.hom(table[c]))
        # representative independence: g kills X'_N meet N'
        for kv in meet:
            if not g.hom.target.is_zero_elem(g.hom(kv)):
                raise MismatchBug("composite depends on the chosen lift")
        rM = self.reduced(f.source)
        return QuotHom(f.source, g.target, ModuleHom(rM.Xmod, g.hom.target, imgs, check=False))

    def add(self, f: QuotHom, g: QuotHom) -> QuotHom:
        return QuotHom(f.source, f.target, f.hom + g.hom)

    def is_iso(self, f: QuotHom) -> bool:
        """ker and coker of the representative both lie in T."""
        return self.T.contains(f.hom.kernel().as_module()[0]) and self.T.contains(f.hom.cokernel())


def quot_hom(M: FGModule, N: FGModule, T: ThickSubcat) -> HomGroup:
    return QuotientCategory(T).hom_group(M, N)


# ---------------------------------------------------------------------------
# test families


def test_family(R: FiniteRing, sums: bool = True) -> list[FGModule]:
    """Every cyclic R/I, plus every pairwise sum (repetitions allowed)."""
    cyc = [cyclic(R, I) for I in all_ideals(R)]
    fam = list(cyc)
    if sums:
        for i in range(len(cyc)):
            for j in range(i, len(cyc)):
                fam.append(direct_sum(cyc[i], cyc[j]))
    return fam


# ---------------------------------------------------------------------------
# localization model


def localization_model(T: ThickSubcat, family: Sequence[FGModule]) -> dict:
    """Hom in Mod(R)/T against Hom over S = R/(1 - e_U), with naturality.

    The comparison sends h : M/(1-e)M -> N/(1-e)N to x -> h(x) on X' = eM,
    which is valid because N' = (1-e)N.  It is checked to be bijective, and
    natural for precomposition with the quotient image of every hom
    generator between family members.
    """
    R = T.ring
    e = T.idempotent()
    f = R.sub(R.one, e)
    S, pi = quotient_ring(R, R.ideal([f]))
    C = QuotientCategory(T)

    def over_S(M):
        rels = [[pi(a) for a in R.unscaled_vec(row, M.g)] for row in M.K]
        return FGModule(S, M.g, rels, label=f"{M.label}_U")

    loc = {M.key(): over_S(M) for M in family}

    def phi(M, N, h: ModuleHom) -> QuotHom:
        rM, rN = C.reduced(M), C.reduced(N)
        imgs = []
        for x in rM.Xgens:
            xs = tuple(pi(a) for a in x)
            y = h(xs)
            lift = tuple(S.lift(a) for a in y)
            imgs.append(rN.proj(lift))
        return QuotHom(M, N, ModuleHom(rM.Xmod, rN.Q, imgs))

    records = []
    ok = True
    for M in family:
        for N in family:
            G = C.hom_group(M, N)
            GS = hom_group(loc[M.key()], loc[N.key()])
            hs = GS.elements()
            images = {phi(M, N, h).key() for h in hs}
            bij = G.order == GS.order == len(images)
            rec = {"M": M.label, "N": N.label, "quotient_order": G.order, "local_order": GS.order,
                   "bijective": bij}
            ok &= bij
            records.append(rec)
    # naturality in the first argument on generators
    nat = True
    count = 0
    hgens = {(M.key(), N.key()): [(h, phi(M, N, h)) for h in hom_group(loc[M.key()], loc[N.key()]).generators()]
             for M in family for N in family}
    for M in family:
        for M2 in family:
            us = hom_group(M2, M).generators()
            for N in family:
                for h, left in hgens[(M.key(), N.key())]:
                    for u in us:
                        uS = ModuleHom(loc[M2.key()], loc[M.key()],
                                       [tuple(pi(a) for a in v) for v in u.images], check=False)
                        lhs = phi(M2, N, h.compose(uS)).key()
                        rhs = C.compose(left, C.image_of(u)).key()
                        nat &= lhs == rhs
                        count += 1
    return {"pairs": len(records), "bijective": ok, "naturality_checks": count, "natural": nat,
            "records": records, "ok": ok and nat}


# ---------------------------------------------------------------------------
# centers


@dataclass
class CenterReport:
    order: int
    ring_order: int
    multiplications_natural: bool
    evaluation_injective: bool
    family_size: int
    constraints: int

    @property
    def ok(self) -> bool:
        return (self.order == self.ring_order and self.multiplications_natural
                and self.evaluation_injective)

    def to_json(self) -> dict:
        return {"center_order": self.order, "ring_order": self.ring_order,
                "multiplications_natural": self.multiplications_natural,
                "evaluation_injective": self.evaluation_injective,
                "family_size": self.family_size, "constraints": self.constraints, "ok": self.ok}


def center_of_category(R: FiniteRing, family: Sequence[FGModule] | None = None) -> CenterReport:
    """Solve for all natural families (eta_M) on the test family.

    Unknowns are endomorphisms of every member; every hom generator
    h : M -> N imposes eta_N h = h eta_M.  The solution group is compared
    with R (multiplication maps) and evaluation at R, 1 is checked to be
    injective on it.
    """
    if R.size == 1:
        return CenterReport(1, 1, True, True, 0, 0)
    if family is None:
        family = test_family(R)
    family = [M for M in family if M.g > 0]
    if not any(M.g == 1 and not M.K for M in family):
        family = [free(R, 1)] + list(family)
    ends = [hom_group(M, M) for M in family]
    widths = [M.g * M.ncols for M in family]
    offs = [sum(widths[:i]) for i in range(len(widths))]
    total = sum(widths)
    n = R.N

    def place(i, row):
        v = [0] * total
        v[offs[i]:offs[i] + widths[i]] = row
        return v

    base = H.howell_form([place(i, r) for i, E in enumerate(ends) for r in E.base], n, total)
    sol = H.howell_form([place(i, r) for i, E in enumerate(ends) for r in E.basis], n, total)

    def decode(i, row) -> ModuleHom:
        return ends[i]._hom(row[offs[i]:offs[i] + widths[i]])

    constraints = 0
    for i, M in enumerate(family):
        for j, N in enumerate(family):
            HG = hom_group(M, N)
            for h in HG.generators():
                constraints += 1
                pairs = []
                for row in sol:
                    eM, eN = decode(i, row), decode(j, row)
                    d1, d2 = eN.compose(h), h.compose(eM)
                    img = []
                    for a, b in zip(d1.images, d2.images):
                        img.extend(N.ring.scaled_vec(tuple(N.ring.sub(x, y) for x, y in zip(a, b))))
                    pairs.append((img, row))
                sol = H.kernel(pairs, n, M.g * N.ncols, total, HG.base)
                sol = H.join(sol, base, n, total)
    order = H.span_order(sol, n) // H.span_order(base, n)
    mult_ok = True
    for r in R.elements():
        row = []
        for M in family:
            imgs = [M.act(r, M.gen(j)) for j in range(M.g)]
            for v in imgs:
                row.extend(M.coords(v))
        mult_ok &= H.in_span(row, sol, n)
    i0 = next(i for i, M in enumerate(family) if M.g == 1 and not M.K)
    pairs = [(list(row[offs[i0]:offs[i0] + widths[i0]]), row) for row in sol]
    ker = H.kernel(pairs, n, widths[i0], total)
    inj = all(H.in_span(r, base, n) for r in ker)
    return CenterReport(order, R.size, mult_ok, inj, len(family), constraints)


@dataclass
class QuotientCenter:
    T: ThickSubcat
    category: QuotientCategory
    elements: list            # QuotHom endomorphisms of p(R)
    local_ring: FiniteRing
    projection: Any
    report: dict

    def restriction(self, r) -> QuotHom:
        R = self.T.ring
        M = self.category.reduced(free(R, 1)).module
        return self.category.image_of(ModuleHom(M, M, [M.act(r, M.gen(0))]))


def center_of_quotient(R: FiniteRing, T: ThickSubcat, family: Sequence[FGModule] | None = None) -> QuotientCenter:
    """End of p(R) in Mod(R)/T as a ring, compared with the localization R/(1 - e_U)."""
    C = QuotientCategory(T)
    RR = free(R, 1)
    ends = C.homs(RR, RR)
    e = T.idempotent()
    S, pi = quotient_ring(R, R.ideal([R.sub(R.one, e)]))
    rR = C.reduced(RR)

    def evaluate(f: QuotHom):
        # f is determined by the image of e (the generator of X' = eR)
        ex = RR.act(e, RR.gen(0))
        val = f.hom(_coords_in(rR, ex))
        return pi(R.canon(rR.Q.canon(val)[0]))

    keys = {f.key(): f for f in ends}
    comm = all(C.compose(a, b).key() == C.compose(b, a).key() for a in ends for b in ends)
    ev = {k: evaluate(f) for k, f in keys.items()}
    bij = len(set(ev.values())) == len(keys) == S.size
    hom_ok = all(evaluate(C.compose(a, b)) == S.mul(evaluate(a), evaluate(b))
                 and evaluate(C.add(a, b)) == S.add(evaluate(a), evaluate(b))
                 for a in ends for b in ends)
    res_ok = True
    restr = {}
    for r in R.elements():
        f = C.image_of(ModuleHom(RR, RR, [RR.act(r, RR.gen(0))]))
        restr[r] = f
        res_ok &= evaluate(f) == pi(r)
    nat = True
    if family is not None:
        for M in family:
            for N in family:
                for f in C.hom_generators(M, N):
                    for r in R.basis():
                        mM = C.image_of(ModuleHom(M, M, [M.act(r, M.gen(j)) for j in range(M.g)]))
                        mN = C.image_of(ModuleHom(N, N, [N.act(r, N.gen(j)) for j in range(N.g)]))
                        nat &= C.compose(f, mM).key() == C.compose(mN, f).key()
    report = {"order": len(keys), "local_ring_order": S.size, "commutative": comm,
              "evaluation_bijective": bij, "evaluation_ring_hom": hom_ok,
              "restriction_is_localization": res_ok, "natural_on_family": nat,
              "ok": comm and bij and hom_ok and res_ok and nat}
    return QuotientCenter(T, C, list(keys.values()), S, pi, report)


def _coords_in(r: Reduced, x) -> tuple:
    """Express an element of X' in the presentation of X' (by search)."""
    inc = ModuleHom(r.Xmod, r.module, r.Xgens, check=False)
    target = r.module.coords(x)
    for v in r.Xmod.elements():
        if r.module.coords(inc(v)) == target:
            return v
    raise MismatchBug("element not in X'")


# ---------------------------------------------------------------------------
# structure presheaf


def restrict_center(CV: QuotientCenter, CU: QuotientCenter, f: QuotHom) -> QuotHom:
    """Image of an endomorphism of p(R) under Mod(R)/<V> -> Mod(R)/<U> (U inside V)."""
    R = CV.T.ring
    RR = free(R, 1)
    rV, rU = CV.category.reduced(RR), CU.category.reduced(RR)
    imgs = []
    for x in rU.Xgens:
        y = f.hom(_coords_in(rV, x))
        imgs.append(rU.proj(_lift_quotient(rV, y)))
    return QuotHom(RR, RR, ModuleHom(rU.Xmod, rU.Q, imgs))


def _lift_quotient(r: Reduced, y) -> tuple:
    """A representative in the module of an element of M/N'."""
    return tuple(r.module.ring.canon(a) for a in y)


def structure_presheaf(R: FiniteRing, family: Sequence[FGModule] | None = None) -> dict:
    """O'(U) = Z(Mod(R)/<U>) on every open, restriction maps, triangle and gluing checks."""
    _, primes = enumerate_ideals_primes(R)
    all_opens = opens(R, primes)
    centers = {U: center_of_quotient(R, thick_of_open(R, U, primes), family) for U in all_opens}
    table = {}
    for U, C in centers.items():
        table["{" + ",".join(U) + "}"] = {"order": C.report["order"],
                                          "ring": C.local_ring.label, "ok": C.report["ok"]}
    res: dict = {}
    for V in all_opens:
        for U in all_opens:
            if set(U) <= set(V):
                res[(U, V)] = {f.key(): restrict_center(centers[V], centers[U], f).key()
                               for f in centers[V].elements}
    tri = True
    for W in all_opens:
        for V in all_opens:
            for U in all_opens:
                if set(U) <= set(V) <= set(W):
                    for f in centers[W].elements:
                        fv = res[(V, W)][f.key()]
                        fv_obj = next(g for g in centers[V].elements if g.key() == fv)
                        tri &= res[(U, V)][fv_obj.key()] == res[(U, W)][f.key()]
    whole = tuple(q.label() for q in primes)
    # restriction from the global center agrees with multiplication maps
    glob = centers[whole]
    compat = all(restrict_center(glob, centers[U], glob.restriction(r)).key()
                 == centers[U].restriction(r).key() for U in all_opens for r in R.elements())
    # gluing: O(U) -> prod over points p in U of O({p}) is bijective
    glue = True
    for U in all_opens:
        imgs = set()
        for f in centers[U].elements:
            imgs.add(tuple(res[((p,), U)][f.key()] for p in U))
        target = 1
        for p in U:
            target *= centers[(p,)].report["order"]
        glue &= len(imgs) == len(centers[U].elements) == target
    return {"table": table, "triangle": tri, "global_restriction": compat, "gluing": glue,
            "ok": tri and compat and glue and all(v["ok"] for v in table.values()),
            "centers": centers}
