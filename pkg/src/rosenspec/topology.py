"""Topologizing reflective subcategories T_I = {M : I*M = 0}, reflectors,
Gabriel products and the closed sets V(T) of the spectrum.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from . import poly as P
from .errors import MixedRings
from .modules import (FGModule, Submodule, all_submodules, annihilator, cyclic,
                      ideal_times_module, in_T)
from .pidmod import PidModule, pid_annihilator
from .rings import (FiniteRing, Ideal, PidIdeal, PrimeIdeal,
                    enumerate_ideals_primes, ideal_ops)


@dataclass(frozen=True)
class TopReflSubcat:
    """T_I, the modules killed by I."""

    ideal: Any

    def contains(self, M) -> bool:
        if isinstance(M, PidModule):
            A = pid_annihilator(M)
            return self.ideal.issubset(A)
        if M.ring is not self.ideal.ring:
            raise MixedRings("module over another ring")
        return in_T(self.ideal, M)

    def label(self) -> str:
        return f"T{self.ideal.label()}"


def t_of_ideal(I) -> TopReflSubcat:
    return TopReflSubcat(I)


def ideal_of_t(family: Sequence) -> Any:
    """Smallest I with every member of the family in T_I: the meet of the annihilators."""
    if not family:
        raise ValueError("family must be nonempty")
    out = None
    for M in family:
        A = pid_annihilator(M) if isinstance(M, PidModule) else annihilator(M)
        out = A if out is None else ideal_ops(A.ring, "intersect", out, A)
    return out


# ---------------------------------------------------------------------------
# reflector


@dataclass
class Reflection:
    reflection: FGModule
    kernel: Submodule
    certificate: dict


def reflector(T: TopReflSubcat, M: FGModule, certify: bool = True) -> Reflection:
    """M -> M/IM together with a proof that IM is the smallest K with M/K in T."""
    I = T.ideal
    if M.ring is not I.ring:
        raise MixedRings("module over another ring")
    K = ideal_times_module(I, M)
    Q, unit = K.quotient()
    cert: dict = {"unit_is_epimorphism": unit.is_surjective(), "quotient_in_T": in_T(I, Q)}
    if certify:
        smaller = [S for S in all_submodules(M) if S.issubset(K) and S.basis != K.basis]
        bad = [S for S in smaller if in_T(I, S.quotient()[0])]
        cert.update({"proper_submodules_checked": len(smaller), "violations": len(bad),
                     "minimal": not bad})
    return Reflection(Q, K, cert)


# ---------------------------------------------------------------------------
# Gabriel product


def _filtration(I: Ideal, J: Ideal, M: FGModule, subs: Sequence[Submodule] | None = None):
    """A submodule X with J*X = 0 and I*(M/X) = 0, searched exhaustively."""
    for X in subs if subs is not None else all_submodules(M):
        Xm, _ = X.as_module()
        if in_T(J, Xm) and in_T(I, X.quotient()[0]):
            return X
    return None


def gabriel_product(S: TopReflSubcat, T: TopReflSubcat, family: Sequence[FGModule] = (),
                    lattices: dict | None = None) -> tuple[TopReflSubcat, list[dict]]:
    """S . T = T_IJ, with a witness or an exhaustive refutation per test module."""
    I, J = S.ideal, T.ideal
    R = I.ring
    if J.ring is not R:
        raise MixedRings("subcategories over different rings")
    IJ = ideal_ops(R, "product", I, J)
    prod = TopReflSubcat(IJ)
    suite = []
    for M in family:
        inside = in_T(IJ, M)
        rec: dict = {"module": M.label, "in_T_IJ": inside}
        if inside:
            X = ideal_times_module(I, M)
            Xm, _ = X.as_module()
            rec.update({"witness": "0 -> IM -> M -> M/IM -> 0",
                        "sub_in_T": in_T(J, Xm), "quotient_in_S": in_T(I, X.quotient()[0])})
            rec["ok"] = rec["sub_in_T"] and rec["quotient_in_S"]
        else:
            subs = lattices.get(M.key()) if lattices else None
            X = _filtration(I, J, M, subs)
            rec.update({"filtration_found": X is not None})
            rec["ok"] = X is None
        suite.append(rec)
    return prod, suite


# ---------------------------------------------------------------------------
# closed sets


@dataclass(frozen=True)
class ClosedSet:
    """Whole, or a sorted duplicate-free list of prime labels."""

    whole: bool
    points: tuple = ()

    def to_json(self):
        return "whole" if self.whole else list(self.points)


def _closed(labels: Sequence[str], ambient: Sequence[str]) -> ClosedSet:
    labs = tuple(sorted(set(labels), key=list(ambient).index))
    if len(labs) == len(ambient) and ambient:
        return ClosedSet(True, labs)
    return ClosedSet(False, labs)


def representative(q: PrimeIdeal):
    I = q.ideal
    if isinstance(I, PidIdeal):
        return PidModule(I.ring, 1 if I.is_zero() else 0, [] if I.is_zero() else [I.gen])
    return cyclic(I.ring, I)


def V_cat(T: TopReflSubcat, primes: Sequence[PrimeIdeal]) -> list[str]:
    """{[R/p] : R/p in T}."""
    return [q.label() for q in primes if T.contains(representative(q))]


def V_ring(I, primes: Sequence[PrimeIdeal]) -> list[str]:
    """{p : I inside p}."""
    return [q.label() for q in primes if I.issubset(q.ideal)]


def build_topology(R, degree_bound: int | None = None, ideals: Sequence | None = None) -> dict:
    """Closed sets V(T_I) with the identities of the Zariski topology checked bit by bit."""
    all_I, primes = enumerate_ideals_primes(R, degree_bound)
    if ideals is None:
        ideals = all_I if all_I is not None else _sample_pid_ideals(R, degree_bound)
    labels = [q.label() for q in primes]
    V = {I.label(): _closed(V_cat(TopReflSubcat(I), primes), labels) for I in ideals}
    checks = []
    one = R.ideal([R.one]) if isinstance(R, FiniteRing) else R.ideal([(1,)])
    zero = R.zero_ideal() if isinstance(R, FiniteRing) else R.ideal([()])
    checks.append(("V(T_(1)) is empty", not V_cat(TopReflSubcat(one), primes)))
    checks.append(("V(T_(0)) is everything", len(V_cat(TopReflSubcat(zero), primes)) == len(primes)))
    for I in ideals:
        for J in ideals:
            a, b = set(V[I.label()].points), set(V[J.label()].points)
            s = ideal_ops(R, "sum", I, J)
            p = ideal_ops(R, "product", I, J)
            vs = set(V_cat(TopReflSubcat(s), primes))
            vp = set(V_cat(TopReflSubcat(p), primes))
            checks.append((f"V{I.label()} & V{J.label()} = V(sum)", a & b == vs))
            checks.append((f"V{I.label()} | V{J.label()} = V(product)", a | b == vp))
    lattice = sorted({c.points for c in V.values()}, key=lambda x: (len(x), [labels.index(y) for y in x]))
    return {"points": labels,
            "closed_sets": [list(c) for c in lattice],
            "V": {k: v.to_json() for k, v in V.items()},
            "checks": checks,
            "ok": all(ok for _, ok in checks)}


def _sample_pid_ideals(R, degree_bound: int) -> list:
    gens = [(), (1,)]
    for f in P.irreducibles_up_to(degree_bound or 1, R.p):
        gens.append(f)
    fs = list(P.irreducibles_up_to(min(degree_bound or 1, 2), R.p))
    for i, f in enumerate(fs):
        for g in fs[i:]:
            gens.append(P.mul(f, g, R.p))
    seen = {}
    for g in gens:
        I = R.ideal([g])
        seen.setdefault(I.gen, I)
    return list(seen.values())


def affine_homeo_check(R, degree_bound: int | None = None, ideals: Sequence | None = None) -> dict:
    """R/p in T_I iff I inside p, for every ideal I and prime p."""
    all_I, primes = enumerate_ideals_primes(R, degree_bound)
    if ideals is None:
        ideals = all_I if all_I is not None else _sample_pid_ideals(R, degree_bound)
    bits = []
    for I in ideals:
        T = TopReflSubcat(I)
        for q in primes:
            lhs = T.contains(representative(q))
            rhs = I.issubset(q.ideal)
            bits.append({"ideal": I.label(), "prime": q.label(), "in_T": lhs, "contained": rhs,
                         "ok": lhs == rhs})
    return {"bits": bits, "matched": sum(b["ok"] for b in bits), "total": len(bits),
            "ok": all(b["ok"] for b in bits)}
