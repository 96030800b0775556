"""Finitely generated modules over F_p[t] and its localizations F_p[t][1/f].

Every such module is R^r plus a sum of cyclic torsion modules R/(d_i), with
d_1 | d_2 | ... monic nonunits.  The structure is read off a Smith normal
form of the relation matrix; over R[1/f] the inverted primes are stripped
from the invariant factors afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import poly as P
from . import smith as S
from .errors import MixedRings, NotADomain
from .rings import LocalizedPolyRing, PidIdeal, PrimeIdeal


def _ops(R) -> S.EuclidOps:
    return S.poly_ops(R.p)


def _clear_row(R, row) -> list[P.Poly]:
    """Scale a row of ring elements by a unit so every entry is a polynomial."""
    if not isinstance(R, LocalizedPolyRing):
        return [R.elem(a) for a in row]
    fr = [R.elem(a) for a in row]
    den: P.Poly = (1,)
    for _, d in fr:
        den = P.divmod_poly(P.mul(den, d, R.p), P.gcd(den, d, R.p), R.p)[0]
    return [P.divmod_poly(P.mul(n, den, R.p), d, R.p)[0] for n, d in fr]


class PidModule:
    """R^rank plus R/(d) for each torsion factor d (normalized, increasing)."""

    def __init__(self, ring, rank: int, factors: Sequence[P.Poly] = (), label: str | None = None):
        self.ring = ring
        p = ring.p
        fs = []
        for d in factors:
            d = ring.assoc(ring.elem(d))
            if d == P.ZERO:
                rank += 1
            elif P.deg(d) > 0:
                fs.append(d)
        self.rank = rank
        self.factors = tuple(_normalize_chain(fs, p))
        self.label = label or self.describe()

    @property
    def g(self) -> int:
        return self.rank + len(self.factors)

    def key(self):
        return (self.ring.p, getattr(self.ring, "inverted_primes", ()), self.rank, self.factors)

    def __eq__(self, other):
        return isinstance(other, PidModule) and self.ring == other.ring and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def describe(self) -> str:
        parts = ["R"] * self.rank + [f"R/({P.fmt(d, self.ring.var)})" for d in self.factors]
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"<PidModule {self.describe()} over {self.ring.label}>"

    def is_zero(self) -> bool:
        return self.g == 0

    def is_torsion(self) -> bool:
        return self.rank == 0

    def diagonal(self) -> list[P.Poly]:
        """Relation diagonal in standard coordinates (0 for free slots)."""
        return list(self.factors) + [P.ZERO] * self.rank

    def to_json(self) -> dict:
        return {"ring": self.ring.descriptor, "rank": self.rank, "factors": [list(d) for d in self.factors]}

    # primary decomposition
    def primary_components(self) -> list[tuple[P.Poly, int]]:
        out = []
        for d in self.factors:
            out.extend(P.factor(d, self.ring.p))
        return sorted(out)

    # -- structure maps in standard coordinates
    def cokernel_factors(self, images: Sequence[Sequence[P.Poly]]) -> list[P.Poly]:
        """Invariant factors of M / span(images), images given in standard coordinates."""
        R = self.ring
        m = self.g
        rows = [[_coord(R, x) for x in v] for v in images]
        diag = self.diagonal()
        for i, d in enumerate(diag):
            if d:
                rows.append([d if j == i else P.ZERO for j in range(m)])
        if not rows:
            return [P.ZERO] * m
        inv = S.invariant_factors(rows, m, _ops(R))
        if isinstance(R, LocalizedPolyRing):
            inv = [R.strip(d) if d else d for d in inv]
        return inv

    def spans(self, images: Sequence[Sequence[P.Poly]]) -> bool:
        return all(d and P.deg(d) == 0 for d in self.cokernel_factors(images))


def _coord(R, x) -> P.Poly:
    if isinstance(R, LocalizedPolyRing):
        if isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], tuple):
            n, d = R.elem(x)
            return n  # the denominator is a unit
        return P.trim(x, R.p)
    return R.elem(x)


def _normalize_chain(factors: Sequence[P.Poly], p: int) -> list[P.Poly]:
    """Invariant factors of a diagonal module given arbitrary cyclic orders."""
    prim: dict[P.Poly, list[int]] = {}
    for d in factors:
        for g, e in P.factor(d, p):
            prim.setdefault(g, []).append(e)
    if not prim:
        return []
    length = max(len(v) for v in prim.values())
    out = [(1,)] * length
    for g, es in prim.items():
        es = sorted(es)
        es = [0] * (length - len(es)) + es
        for i, e in enumerate(es):
            out[i] = P.mul(out[i], P.power(g, e, p), p)
    return out


def present_pid_module(ring, g: int, relations: Sequence[Sequence] = (), label: str | None = None) -> PidModule:
    """Module R^g modulo the row span of ``relations``, via Smith form."""
    if not getattr(ring, "is_pid", False):
        raise NotADomain(f"{ring} is not a principal ideal domain")
    rows = [_clear_row(ring, r) for r in relations]
    for r in rows:
        if len(r) != g:
            raise ValueError(f"relation of length {len(r)}, expected {g}")
    if rows:
        diag = S.invariant_factors(rows, g, _ops(ring))
    else:
        diag = [P.ZERO] * g
    rank = sum(1 for d in diag if not d)
    torsion = [d for d in diag if d]
    if isinstance(ring, LocalizedPolyRing):
        torsion = [ring.strip(d) for d in torsion]
    return PidModule(ring, rank, torsion, label=label)


def pid_direct_sum(M: PidModule, N: PidModule) -> PidModule:
    if M.ring != N.ring:
        raise MixedRings("modules over different rings")
    return PidModule(M.ring, M.rank + N.rank, list(M.factors) + list(N.factors))


def pid_annihilator(M: PidModule) -> PidIdeal:
    R = M.ring
    if M.rank:
        return PidIdeal(R, P.ZERO)
    return PidIdeal(R, M.factors[-1] if M.factors else (1,))


def support_contains(M: PidModule, prime) -> bool:
    """M_p != 0: rank > 0, or p a nonzero prime dividing some factor."""
    I = prime.ideal if isinstance(prime, PrimeIdeal) else prime
    if M.rank:
        return True
    if I.is_zero():
        return False
    return any(P.divides(I.gen, d, M.ring.p) for d in M.factors)


def pid_support(M: PidModule, primes: Sequence[PrimeIdeal] | None = None) -> list[PrimeIdeal]:
    """Support, extending the prime list by every prime factor of the invariant factors."""
    R = M.ring
    out: dict = {}
    for q in primes or ():
        out[q.ideal.gen] = q
    for g, _ in M.primary_components():
        out.setdefault(g, PrimeIdeal(PidIdeal(R, g), {"irreducible": list(g)}))
    if M.rank:
        out.setdefault(P.ZERO, PrimeIdeal(PidIdeal(R, P.ZERO), "zero ideal of a domain"))
    pts = [q for q in out.values() if support_contains(M, q)]
    return sorted(pts, key=lambda q: q.ideal.sort_key())


@dataclass(frozen=True)
class PidSubmodule:
    """Submodule of a PidModule, canonical Hermite basis of its preimage in R^g."""

    ambient: PidModule
    basis: tuple

    def describe(self) -> str:
        return f"span{[ [P.fmt(x, self.ambient.ring.var) for x in r] for r in self.basis]}"


def pid_submodule(M: PidModule, gens: Sequence[Sequence[P.Poly]]) -> PidSubmodule:
    rows = [[_coord(M.ring, x) for x in v] for v in gens]
    for i, d in enumerate(M.diagonal()):
        if d:
            rows.append([d if j == i else P.ZERO for j in range(M.g)])
    H = S.hermite(rows, M.g, _ops(M.ring))
    return PidSubmodule(M, tuple(tuple(r) for r in H))


def torsion_rank(M: PidModule) -> tuple[PidSubmodule, int]:
    """Tor(M) (the span of the torsion coordinates) and the free rank."""
    if not getattr(M.ring, "is_domain", False):
        raise NotADomain("torsion needs a domain")
    k = len(M.factors)
    gens = [[(1,) if j == i else P.ZERO for j in range(M.g)] for i in range(k)]
    return pid_submodule(M, gens), M.rank


def pid_is_isomorphic(M: PidModule, N: PidModule) -> bool:
    if M.ring != N.ring:
        raise MixedRings("modules over different rings")
    return M.key() == N.key()


def pid_hom_group(M: PidModule, N: PidModule) -> list[dict]:
    """Generators of Hom(M, N), one per pair of cyclic summands.

    Hom(R, N_j) = N_j; Hom(R/(a), R/(b)) is cyclic of order gcd(a, b),
    generated by 1 -> b/gcd(a, b); Hom(R/(a), R) = 0.
    """
    if M.ring != N.ring:
        raise MixedRings("modules over different rings")
    p = M.ring.p
    src = list(M.diagonal())
    tgt = list(N.diagonal())
    gens = []
    for i, a in enumerate(src):
        for j, b in enumerate(tgt):
            if not a:
                gens.append({"from": i, "to": j, "image": (1,), "order": b})
            elif b:
                g = P.gcd(a, b, p)
                if P.deg(g) > 0:
                    gens.append({"from": i, "to": j, "image": P.divmod_poly(b, g, p)[0], "order": g})
    return gens
